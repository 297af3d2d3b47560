//! 2D world geometry: segment maps, ray casting, and distance queries.
//!
//! Worlds are collections of wall segments. Everything here is pure: the
//! same inputs always produce bit-identical outputs, which the simulation
//! relies on for reproducible runs.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::path::Path;

use thiserror::Error;

use crate::vehicle::RobotPose;

/// Robot center-to-wall distance treated as a collision. World start poses
/// must clear it; the environment uses it as its default crash threshold.
pub const DEFAULT_COLLISION_THRESHOLD: f64 = 0.21;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("segment endpoints coincide at ({x}, {y})")]
    DegenerateSegment { x: f64, y: f64 },
    #[error("world `{name}` has {count} segments; at least 3 are required")]
    TooFewSegments { name: String, count: usize },
    #[error(
        "start pose ({x}, {y}) is {dist:.4} m from the nearest wall; \
         must exceed {min} m"
    )]
    StartTooClose { x: f64, y: f64, dist: f64, min: f64 },
    #[error("line {line}: unknown directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: duplicate `{directive}` directive")]
    DuplicateDirective { line: usize, directive: &'static str },
    #[error("missing `{directive}` directive")]
    MissingDirective { directive: &'static str },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("failed to read world file: {0}")]
    Io(#[from] std::io::Error),
}

/// Point (or vector) in the world plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Z component of the 3D cross product; positive when `other` lies
    /// counterclockwise of `self`.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Wall segment with distinct endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    a: Point2,
    b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Result<Self, WorldError> {
        if a == b {
            return Err(WorldError::DegenerateSegment { x: a.x, y: a.y });
        }
        Ok(Segment { a, b })
    }

    pub fn a(&self) -> Point2 {
        self.a
    }

    pub fn b(&self) -> Point2 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }
}

/// Half-line from an origin along a unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    origin: Point2,
    direction: Point2,
}

impl Ray {
    /// Builds a ray from any nonzero direction vector; the direction is
    /// normalized so that intersection parameters are distances in meters.
    pub fn new(origin: Point2, direction: Point2) -> Self {
        let norm = direction.norm();
        assert!(norm > 0.0, "ray direction must be nonzero");
        Ray {
            origin,
            direction: direction * (1.0 / norm),
        }
    }

    pub fn from_angle(origin: Point2, angle: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        Ray {
            origin,
            direction: Point2::new(cos, sin),
        }
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    /// Unit direction (within 1e-9 of unit norm).
    pub fn direction(&self) -> Point2 {
        self.direction
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        self.origin + self.direction * t
    }
}

/// Ordered LIDAR beam ranges, in meters, left to right in casting order.
#[derive(Debug, Clone, PartialEq)]
pub struct LidarScan {
    ranges: Vec<f64>,
}

impl LidarScan {
    pub fn new(ranges: Vec<f64>) -> Self {
        LidarScan { ranges }
    }

    pub fn ranges(&self) -> &[f64] {
        &self.ranges
    }
}

/// Distance along `ray` to the nearest point of `seg`, or `None` when the
/// ray misses.
///
/// Transversal hits return the unique crossing distance. A collinear
/// overlapping segment returns the distance to its nearest overlapping
/// point (0 when the origin lies inside the overlap); a parallel offset
/// segment is a miss. Endpoint hits count as hits.
pub fn ray_segment_intersect(ray: &Ray, seg: &Segment) -> Option<f64> {
    let d = ray.direction();
    let e = seg.b() - seg.a();
    let f = seg.a() - ray.origin();
    let denom = d.cross(e);
    if denom != 0.0 {
        let t = f.cross(e) / denom;
        let u = f.cross(d) / denom;
        if t >= 0.0 && (0.0..=1.0).contains(&u) {
            Some(t)
        } else {
            None
        }
    } else if f.cross(d) != 0.0 {
        // Parallel lines with lateral offset never meet.
        None
    } else {
        // Collinear: project both endpoints onto the ray axis.
        let ta = f.dot(d);
        let tb = (seg.b() - ray.origin()).dot(d);
        let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        if hi < 0.0 {
            None
        } else {
            Some(lo.max(0.0))
        }
    }
}

/// Distance from `p` to the closest point of `seg`.
pub fn point_segment_distance(p: Point2, seg: &Segment) -> f64 {
    let e = seg.b() - seg.a();
    let t = ((p - seg.a()).dot(e) / e.dot(e)).clamp(0.0, 1.0);
    p.distance(seg.a() + e * t)
}

/// Minimum distance from `p` to any wall of the world.
pub fn min_wall_distance(world: &WorldMap, p: Point2) -> f64 {
    world
        .segments()
        .iter()
        .map(|seg| point_segment_distance(p, seg))
        .fold(f64::INFINITY, f64::min)
}

/// Casts `n_beams` rays spread symmetrically over `fov` radians around the
/// robot heading and returns the range of each beam, clamped to
/// `[0, max_range]`. Beam `i` points at world angle
/// `theta - fov/2 + i * fov/(n_beams - 1)`; a single beam points straight
/// ahead. Beams that hit nothing within `max_range` read `max_range`.
pub fn cast_scan(
    world: &WorldMap,
    pose: RobotPose,
    fov: f64,
    n_beams: usize,
    max_range: f64,
) -> LidarScan {
    assert!(n_beams >= 1, "scan requires at least one beam");
    assert!(
        fov > 0.0 && fov <= 2.0 * std::f64::consts::PI,
        "field of view must be in (0, 2*pi]"
    );
    assert!(max_range > 0.0, "max_range must be positive");
    let origin = Point2::new(pose.x, pose.y);
    let mut ranges = Vec::with_capacity(n_beams);
    for i in 0..n_beams {
        let angle = if n_beams == 1 {
            pose.theta
        } else {
            pose.theta - fov / 2.0 + i as f64 * fov / (n_beams - 1) as f64
        };
        let ray = Ray::from_angle(origin, angle);
        let mut best = max_range;
        for seg in world.segments() {
            if let Some(t) = ray_segment_intersect(&ray, seg) {
                if t < best {
                    best = t;
                }
            }
        }
        ranges.push(best);
    }
    LidarScan::new(ranges)
}

/// Named set of wall segments plus the canonical start pose.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldMap {
    name: String,
    segments: Vec<Segment>,
    start: RobotPose,
}

impl WorldMap {
    /// Builds a world, enforcing the structural invariants: at least 3
    /// non-degenerate segments and a start pose clear of every wall by more
    /// than [`DEFAULT_COLLISION_THRESHOLD`].
    pub fn new(name: String, segments: Vec<Segment>, start: RobotPose) -> Result<Self, WorldError> {
        if segments.len() < 3 {
            return Err(WorldError::TooFewSegments {
                name,
                count: segments.len(),
            });
        }
        let world = WorldMap {
            name,
            segments,
            start,
        };
        let dist = min_wall_distance(&world, Point2::new(start.x, start.y));
        if dist <= DEFAULT_COLLISION_THRESHOLD {
            return Err(WorldError::StartTooClose {
                x: start.x,
                y: start.y,
                dist,
                min: DEFAULT_COLLISION_THRESHOLD,
            });
        }
        Ok(world)
    }

    /// Parses the line-oriented world format:
    ///
    /// ```text
    /// # comment
    /// name <identifier>            (exactly once)
    /// start <x> <y> <theta>        (exactly once)
    /// segment <x1> <y1> <x2> <y2>  (one or more)
    /// ```
    ///
    /// `#` starts a comment anywhere on a line; blank lines are ignored;
    /// any other directive is an error.
    pub fn parse(text: &str) -> Result<Self, WorldError> {
        let mut name: Option<String> = None;
        let mut start: Option<RobotPose> = None;
        let mut segments = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let mut tokens = content.split_whitespace();
            let Some(directive) = tokens.next() else {
                continue;
            };
            let rest: Vec<&str> = tokens.collect();
            match directive {
                "name" => {
                    if name.is_some() {
                        return Err(WorldError::DuplicateDirective {
                            line,
                            directive: "name",
                        });
                    }
                    if rest.len() != 1 {
                        return Err(WorldError::Malformed {
                            line,
                            message: format!(
                                "`name` takes exactly one identifier, got {}",
                                rest.len()
                            ),
                        });
                    }
                    name = Some(rest[0].to_string());
                }
                "start" => {
                    if start.is_some() {
                        return Err(WorldError::DuplicateDirective {
                            line,
                            directive: "start",
                        });
                    }
                    let nums = parse_numbers(line, "start", &rest, 3)?;
                    start = Some(RobotPose::new(nums[0], nums[1], nums[2]));
                }
                "segment" => {
                    let nums = parse_numbers(line, "segment", &rest, 4)?;
                    segments.push(Segment::new(
                        Point2::new(nums[0], nums[1]),
                        Point2::new(nums[2], nums[3]),
                    )?);
                }
                other => {
                    return Err(WorldError::UnknownDirective {
                        line,
                        directive: other.to_string(),
                    });
                }
            }
        }
        let name = name.ok_or(WorldError::MissingDirective { directive: "name" })?;
        let start = start.ok_or(WorldError::MissingDirective {
            directive: "start",
        })?;
        WorldMap::new(name, segments, start)
    }

    pub fn from_file(path: &Path) -> Result<Self, WorldError> {
        WorldMap::parse(&std::fs::read_to_string(path)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> RobotPose {
        self.start
    }

    /// Axis-aligned bounding box over all segment endpoints.
    pub fn bounds(&self) -> (Point2, Point2) {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for seg in &self.segments {
            for p in [seg.a(), seg.b()] {
                min.x = min.x.min(p.x);
                min.y = min.y.min(p.y);
                max.x = max.x.max(p.x);
                max.y = max.y.max(p.y);
            }
        }
        (min, max)
    }
}

fn parse_numbers(
    line: usize,
    directive: &str,
    tokens: &[&str],
    expected: usize,
) -> Result<Vec<f64>, WorldError> {
    if tokens.len() != expected {
        return Err(WorldError::Malformed {
            line,
            message: format!(
                "`{directive}` takes {expected} numbers, got {}",
                tokens.len()
            ),
        });
    }
    tokens
        .iter()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| WorldError::Malformed {
                line,
                message: format!("`{tok}` is not a number"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn seg(x1: f64, y1: f64, x2: f64, y2: f64) -> Segment {
        Segment::new(Point2::new(x1, y1), Point2::new(x2, y2)).unwrap()
    }

    /// 10x10 axis-aligned square room.
    fn square_world() -> WorldMap {
        WorldMap::new(
            "square".to_string(),
            vec![
                seg(0.0, 0.0, 10.0, 0.0),
                seg(10.0, 0.0, 10.0, 10.0),
                seg(10.0, 10.0, 0.0, 10.0),
                seg(0.0, 10.0, 0.0, 0.0),
            ],
            RobotPose::new(5.0, 5.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn perpendicular_hit_distance() {
        let ray = Ray::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        let wall = seg(2.0, -1.0, 2.0, 1.0);
        assert_eq!(ray_segment_intersect(&ray, &wall), Some(2.0));
    }

    #[test]
    fn parallel_offset_misses() {
        let ray = Ray::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        let wall = seg(0.0, 1.0, 5.0, 1.0);
        assert_eq!(ray_segment_intersect(&ray, &wall), None);
    }

    #[test]
    fn segment_behind_origin_misses() {
        let ray = Ray::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        let wall = seg(-2.0, -1.0, -2.0, 1.0);
        assert_eq!(ray_segment_intersect(&ray, &wall), None);
    }

    #[test]
    fn collinear_overlap_returns_nearest_point() {
        let ray = Ray::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        // Ahead of the origin: nearest endpoint.
        assert_eq!(ray_segment_intersect(&ray, &seg(3.0, 0.0, 7.0, 0.0)), Some(3.0));
        assert_eq!(ray_segment_intersect(&ray, &seg(7.0, 0.0, 3.0, 0.0)), Some(3.0));
        // Straddling the origin: the origin itself overlaps.
        assert_eq!(ray_segment_intersect(&ray, &seg(-1.0, 0.0, 4.0, 0.0)), Some(0.0));
        // Entirely behind: miss.
        assert_eq!(ray_segment_intersect(&ray, &seg(-5.0, 0.0, -1.0, 0.0)), None);
    }

    #[test]
    fn endpoint_graze_counts_as_hit() {
        let ray = Ray::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        let wall = seg(4.0, 0.0, 4.0, 3.0);
        assert_eq!(ray_segment_intersect(&ray, &wall), Some(4.0));
    }

    #[test]
    fn oblique_hit_matches_hand_value() {
        // 45-degree ray against the vertical line x = 3: length 3*sqrt(2).
        let ray = Ray::from_angle(Point2::new(0.0, 0.0), PI / 4.0);
        let wall = seg(3.0, 0.0, 3.0, 10.0);
        let t = ray_segment_intersect(&ray, &wall).unwrap();
        assert!((t - 3.0 * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn point_segment_distance_examples() {
        let wall = seg(0.0, 0.0, 10.0, 0.0);
        assert!((point_segment_distance(Point2::new(5.0, 1.0), &wall) - 1.0).abs() < 1e-12);
        // Beyond an endpoint the nearest point is the endpoint itself.
        assert!(
            (point_segment_distance(Point2::new(13.0, 4.0), &wall) - 5.0).abs() < 1e-12
        );
        assert_eq!(point_segment_distance(Point2::new(7.0, 0.0), &wall), 0.0);
    }

    #[test]
    fn min_wall_distance_takes_nearest_wall() {
        let world = WorldMap::new(
            "strips".to_string(),
            vec![
                seg(0.0, 0.0, 10.0, 0.0),
                seg(0.0, 50.0, 10.0, 50.0),
                seg(0.0, 100.0, 10.0, 100.0),
            ],
            RobotPose::new(5.0, 25.0, 0.0),
        )
        .unwrap();
        assert!((min_wall_distance(&world, Point2::new(5.0, 1.0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn centered_scan_in_square_room() {
        let world = square_world();
        let scan = cast_scan(&world, RobotPose::new(5.0, 5.0, 0.0), 1.5 * PI, 5, 6.0);
        let r = scan.ranges();
        assert_eq!(r.len(), 5);
        // Beams at +-3*pi/4 would travel ~7.07 m; they clamp to max_range.
        assert!((r[0] - 6.0).abs() < 1e-12);
        assert!((r[4] - 6.0).abs() < 1e-12);
        // Center beam hits the x = 10 wall.
        assert!((r[2] - 5.0).abs() < 1e-12);
        // Beams at +-3*pi/8 hit the top/bottom walls at 5/sin(3*pi/8).
        let expected = 5.0 / (3.0 * PI / 8.0).sin();
        assert!((r[1] - expected).abs() < 1e-12);
        assert!((r[3] - expected).abs() < 1e-12);
    }

    #[test]
    fn single_beam_points_along_heading() {
        let world = square_world();
        let scan = cast_scan(&world, RobotPose::new(5.0, 5.0, PI / 2.0), 1.5 * PI, 1, 20.0);
        assert_eq!(scan.ranges().len(), 1);
        assert!((scan.ranges()[0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn scan_is_pure() {
        let world = square_world();
        let pose = RobotPose::new(2.5, 7.0, 1.1);
        let a = cast_scan(&world, pose, 1.5 * PI, 5, 6.0);
        let b = cast_scan(&world, pose, 1.5 * PI, 5, 6.0);
        assert_eq!(a, b);
    }

    #[test]
    fn world_parse_round_trip() {
        let text = "\
# test world
name demo
start 5 5 0
segment 0 0 10 0
segment 10 0 10 10   # right wall
segment 10 10 0 10
segment 0 10 0 0
";
        let world = WorldMap::parse(text).unwrap();
        assert_eq!(world.name(), "demo");
        assert_eq!(world.segments().len(), 4);
        assert_eq!(world.start(), RobotPose::new(5.0, 5.0, 0.0));
    }

    #[test]
    fn world_parse_rejects_bad_input() {
        let valid_tail = "start 5 5 0\nsegment 0 0 10 0\nsegment 10 0 10 10\nsegment 10 10 0 10\n";
        let cases = [
            // Unknown directive.
            (
                format!("name w\nwall 0 0 1 1\n{valid_tail}"),
                "unknown directive",
            ),
            // Missing name.
            (valid_tail.to_string(), "missing `name`"),
            // Duplicate name.
            (format!("name a\nname b\n{valid_tail}"), "duplicate `name`"),
            // Duplicate start.
            (
                format!("name w\nstart 1 1 0\n{valid_tail}"),
                "duplicate `start`",
            ),
            // Wrong arity.
            (
                format!("name w\nstart 5 5\nsegment 0 0 10 0\nsegment 10 0 10 10\nsegment 10 10 0 10\n"),
                "takes 3 numbers",
            ),
            // Not a number.
            (
                format!("name w\nstart 5 5 zero\nsegment 0 0 10 0\nsegment 10 0 10 10\nsegment 10 10 0 10\n"),
                "not a number",
            ),
            // Zero-length segment.
            (
                format!("name w\nstart 5 5 0\nsegment 1 1 1 1\nsegment 0 0 10 0\nsegment 10 0 10 10\n"),
                "coincide",
            ),
        ];
        for (text, needle) in cases {
            let err = WorldMap::parse(&text).unwrap_err().to_string();
            assert!(
                err.contains(needle),
                "expected `{needle}` in `{err}` for input:\n{text}"
            );
        }
    }

    #[test]
    fn world_requires_three_segments() {
        let err = WorldMap::parse("name w\nstart 5 5 0\nsegment 0 0 10 0\n").unwrap_err();
        assert!(matches!(err, WorldError::TooFewSegments { count: 1, .. }));
    }

    #[test]
    fn world_rejects_start_touching_a_wall() {
        let text = "name w\nstart 5 0.1 0\nsegment 0 0 10 0\nsegment 10 0 10 10\nsegment 10 10 0 10\n";
        let err = WorldMap::parse(text).unwrap_err();
        assert!(matches!(err, WorldError::StartTooClose { .. }));
    }

    /// Simple marching check, independent of the analytic intersection: walk
    /// the ray in small steps until it comes within a coarse band of the
    /// segment, then refine. Distance from a point sliding along a line to a
    /// convex set is convex in the slide parameter, so ternary search pins
    /// the closest approach; it counts as a hit only if that distance is
    /// (numerically) zero.
    fn marching_hit(ray: &Ray, segment: &Segment, t_max: f64) -> Option<f64> {
        let step = 1e-4;
        let band = 5.0 * step;
        let d = |t: f64| point_segment_distance(ray.point_at(t), segment);
        let mut entry = None;
        let mut t = 0.0;
        while t <= t_max {
            if d(t) < band {
                entry = Some(t);
                break;
            }
            t += step;
        }
        let mut lo = (entry? - step).max(0.0);
        let mut hi = t_max;
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if d(m1) <= d(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let t_star = 0.5 * (lo + hi);
        (d(t_star) < 1e-9).then_some(t_star)
    }

    #[test]
    fn intersection_agrees_with_marching_on_random_cases() {
        let mut rng = crate::rng::Rng64::new(2024);
        let mut checked = 0;
        for _ in 0..300 {
            let mut coord = |lo: f64, hi: f64| lo + (hi - lo) * rng.next_f64();
            let origin = Point2::new(coord(-2.0, 2.0), coord(-2.0, 2.0));
            let angle = coord(-PI, PI);
            let ray = Ray::from_angle(origin, angle);
            let segment = seg(
                coord(-4.0, 4.0),
                coord(-4.0, 4.0),
                coord(-4.0, 4.0),
                coord(-4.0, 4.0),
            );
            let analytic = ray_segment_intersect(&ray, &segment);
            let marched = marching_hit(&ray, &segment, 12.0);
            match (analytic, marched) {
                (Some(t), Some(m)) => {
                    assert!((t - m).abs() < 1e-6, "t={t} vs march={m}");
                    checked += 1;
                }
                (None, None) => checked += 1,
                // The marching tolerance is ~5e-4 m; skip cases whose true
                // clearance falls inside that grazing band.
                (a, m) => {
                    let clearance = (0..120_000)
                        .map(|i| point_segment_distance(ray.point_at(i as f64 * 1e-4), &segment))
                        .fold(f64::INFINITY, f64::min);
                    assert!(
                        clearance < 1e-3,
                        "disagreement away from tangency: {a:?} vs {m:?}"
                    );
                }
            }
        }
        assert!(checked >= 280, "only {checked} clean cases");
    }

    fn arb_rigid_motion() -> impl Strategy<Value = (f64, f64, f64)> {
        (-PI..PI, -5.0..5.0f64, -5.0..5.0f64)
    }

    proptest! {
        #[test]
        fn intersection_is_rigid_motion_equivariant(
            (phi, tx, ty) in arb_rigid_motion(),
            ox in -3.0..3.0f64, oy in -3.0..3.0f64, angle in -PI..PI,
            ax in -4.0..4.0f64, ay in -4.0..4.0f64,
            bx in -4.0..4.0f64, by in -4.0..4.0f64,
        ) {
            prop_assume!((ax - bx).abs() > 1e-6 || (ay - by).abs() > 1e-6);
            let transform = |p: Point2| {
                let (sin, cos) = phi.sin_cos();
                Point2::new(p.x * cos - p.y * sin + tx, p.x * sin + p.y * cos + ty)
            };
            let ray = Ray::from_angle(Point2::new(ox, oy), angle);
            let segment = seg(ax, ay, bx, by);
            let moved_ray = Ray::from_angle(transform(Point2::new(ox, oy)), angle + phi);
            let moved_seg = Segment::new(transform(segment.a()), transform(segment.b())).unwrap();
            let before = ray_segment_intersect(&ray, &segment);
            let after = ray_segment_intersect(&moved_ray, &moved_seg);
            match (before, after) {
                (Some(t0), Some(t1)) => prop_assert!((t0 - t1).abs() < 1e-9),
                (None, None) => {}
                (a, b) => {
                    // Hit/miss may only flip within rounding of tangency.
                    let t = a.or(b).unwrap();
                    let on_moved = a.is_none();
                    let (r, s) = if on_moved { (&moved_ray, &moved_seg) } else { (&ray, &segment) };
                    prop_assert!(point_segment_distance(r.point_at(t), s) < 1e-6);
                }
            }
        }

        #[test]
        fn scan_ranges_stay_in_bounds(x in 0.5..9.5f64, y in 0.5..9.5f64, theta in -PI..PI) {
            let world = square_world();
            let scan = cast_scan(&world, RobotPose::new(x, y, theta), 1.5 * PI, 5, 6.0);
            for &r in scan.ranges() {
                prop_assert!((0.0..=6.0).contains(&r));
            }
        }

        #[test]
        fn wall_distance_lower_bounds_every_beam(x in 0.5..9.5f64, y in 0.5..9.5f64,
                                                 theta in -PI..PI) {
            let world = square_world();
            let pose = RobotPose::new(x, y, theta);
            let scan = cast_scan(&world, pose, 1.5 * PI, 5, 20.0);
            let min_beam = scan.ranges().iter().fold(f64::INFINITY, |a, &b| a.min(b));
            let dist = min_wall_distance(&world, Point2::new(x, y));
            prop_assert!(dist <= min_beam + 1e-12);
        }
    }
}
