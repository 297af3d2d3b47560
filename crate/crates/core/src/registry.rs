//! Environment registry: maps stable environment ids to worlds.
//!
//! Four worlds ship built in. Additional world files can be registered at
//! runtime (the CLI does this for every `*.world` file in the directory
//! named by the `GYMNAV_WORLDS` environment variable).

use std::collections::BTreeMap;
use std::path::Path;

use crate::environment::{EnvConfig, EnvError, Environment};
use crate::geometry::WorldMap;

const BUILTIN_WORLDS: [(&str, &str, &str); 4] = [
    (
        "CircuitTurtlebotLidar-v0",
        include_str!("../worlds/circuit.world"),
        "Rectangular loop around an island with one diagonal wall",
    ),
    (
        "Circuit2TurtlebotLidar-v0",
        include_str!("../worlds/circuit2.world"),
        "L-shaped loop of straight corridors; clockwise laps make five right turns and one left",
    ),
    (
        "MazeTurtlebotLidar-v0",
        include_str!("../worlds/maze.world"),
        "Winding loop with wall stubs, a chamfered corner and 1 m narrow passages",
    ),
    (
        "RoundTurtlebotLidar-v0",
        include_str!("../worlds/round.world"),
        "Oval ring between two concentric 16-gons",
    ),
];

/// One registered environment.
#[derive(Debug, Clone)]
pub struct EnvEntry {
    id: String,
    description: String,
    world: WorldMap,
}

impl EnvEntry {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn world(&self) -> &WorldMap {
        &self.world
    }
}

/// Id-keyed collection of environments; iteration is sorted by id.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    entries: BTreeMap<String, EnvEntry>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry::default()
    }

    /// Registry holding the four built-in worlds.
    pub fn builtin() -> Self {
        let mut registry = Registry::empty();
        for (id, text, description) in BUILTIN_WORLDS {
            let world = WorldMap::parse(text).expect("built-in world files are valid");
            registry
                .register(id.to_string(), description.to_string(), world)
                .expect("built-in ids are unique");
        }
        registry
    }

    pub fn register(
        &mut self,
        id: String,
        description: String,
        world: WorldMap,
    ) -> Result<(), EnvError> {
        if self.entries.contains_key(&id) {
            return Err(EnvError::InvalidConfig(format!(
                "environment id `{id}` is already registered"
            )));
        }
        self.entries.insert(
            id.clone(),
            EnvEntry {
                id,
                description,
                world,
            },
        );
        Ok(())
    }

    /// Loads every `*.world` file in `dir` (in file-name order) and
    /// registers each under its declared world name. Returns the number of
    /// worlds added.
    pub fn add_worlds_dir(&mut self, dir: &Path) -> Result<usize, EnvError> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(crate::geometry::WorldError::from)?
            .collect::<Result<Vec<_>, _>>()
            .map_err(crate::geometry::WorldError::from)?
            .into_iter()
            .map(|entry| entry.path())
            .filter(|path| path.extension().is_some_and(|ext| ext == "world"))
            .collect();
        paths.sort();
        let mut added = 0;
        for path in paths {
            let world = WorldMap::from_file(&path)?;
            let id = world.name().to_string();
            let description = format!("Custom world from {}", path.display());
            self.register(id, description, world)?;
            added += 1;
        }
        Ok(added)
    }

    pub fn entries(&self) -> impl Iterator<Item = &EnvEntry> {
        self.entries.values()
    }

    pub fn ids(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    pub fn get(&self, id: &str) -> Option<&EnvEntry> {
        self.entries.get(id)
    }

    /// Builds a fresh environment with the default config for `id`.
    pub fn make(&self, id: &str) -> Result<Environment, EnvError> {
        let entry = self.entries.get(id).ok_or_else(|| EnvError::UnknownEnv {
            id: id.to_string(),
            known: self.ids(),
        })?;
        Environment::new(EnvConfig::new(entry.world.clone()))
    }
}

/// Builds an environment from the built-in registry.
pub fn make(id: &str) -> Result<Environment, EnvError> {
    Registry::builtin().make(id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_registry_has_the_four_worlds() {
        let registry = Registry::builtin();
        assert_eq!(
            registry.ids(),
            vec![
                "Circuit2TurtlebotLidar-v0",
                "CircuitTurtlebotLidar-v0",
                "MazeTurtlebotLidar-v0",
                "RoundTurtlebotLidar-v0",
            ]
        );
    }

    #[test]
    fn make_builds_default_environments() {
        for (id, _, _) in BUILTIN_WORLDS {
            let env = make(id).unwrap();
            // Builtin world files carry their registry id as the world name.
            assert_eq!(env.config().world.name(), id, "world for {id}");
            assert_eq!(env.config().substeps, 8);
        }
    }

    #[test]
    fn unknown_id_lists_known_ids() {
        let err = make("CartPole-v1").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("CartPole-v1"));
        for (id, _, _) in BUILTIN_WORLDS {
            assert!(msg.contains(id), "{msg}");
        }
    }

    #[test]
    fn reset_returns_the_start_observation() {
        let mut env = make("Circuit2TurtlebotLidar-v0").unwrap();
        let obs = env.reset();
        assert_eq!(obs, env.observe());
        assert_eq!(env.pose(), env.config().world.start());
    }

    #[test]
    fn external_world_files_can_be_registered() {
        let dir = std::env::temp_dir().join(format!("gymnav-worlds-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(
            dir.join("ring.world"),
            "name ring\nstart 5 5 0\nsegment 0 0 10 0\nsegment 10 0 10 10\nsegment 10 10 0 10\nsegment 0 10 0 0\n",
        )
        .unwrap();
        std::fs::write(dir.join("notes.txt"), "ignored").unwrap();
        let mut registry = Registry::builtin();
        let added = registry.add_worlds_dir(&dir).unwrap();
        assert_eq!(added, 1);
        assert!(registry.make("ring").is_ok());
        // Re-registering the same name collides.
        let mut again = registry.clone();
        assert!(again.add_worlds_dir(&dir).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn empty_registry_lists_nothing() {
        let registry = Registry::empty();
        assert_eq!(registry.entries().count(), 0);
        assert!(registry.make("anything").is_err());
    }
}
