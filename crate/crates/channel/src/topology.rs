use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{stream_rng, ChannelError, TOPOLOGY_STREAM};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned square given by its center and side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Square {
    pub center: Point,
    pub side: f64,
}

impl Square {
    pub fn contains(&self, p: Point) -> bool {
        let h = self.side / 2.0;
        (p.x - self.center.x).abs() <= h && (p.y - self.center.y).abs() <= h
    }

    fn sample(&self, rng: &mut impl Rng) -> Point {
        let h = self.side / 2.0;
        Point::new(
            self.center.x + rng.gen_range(-h..=h),
            self.center.y + rng.gen_range(-h..=h),
        )
    }
}

/// Geometry of a deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TopologyConfig {
    /// One RRH at the center of a square, one on each vertex; users uniform
    /// in a concentric larger square.
    Small {
        rrh_side: f64,
        user_side: f64,
        users: usize,
    },
    /// Grid of square clusters, each with the small layout scaled to
    /// `rrh_offset` (center RRH plus four at `(+-offset, +-offset)`); users
    /// uniform over the whole grid.
    Clustered {
        clusters_x: usize,
        clusters_y: usize,
        cluster_side: f64,
        rrh_offset: f64,
        users: usize,
    },
    /// Explicit RRH positions, users uniform in `user_region`; one cluster.
    Custom {
        rrhs: Vec<Point>,
        user_region: Square,
        users: usize,
    },
}

impl TopologyConfig {
    /// 5 RRHs, 3 users, RRH square of side 375 m, user square of side 750 m.
    pub fn small() -> Self {
        Self::Small {
            rrh_side: 375.0,
            user_side: 750.0,
            users: 3,
        }
    }

    /// 25 clusters of 400 m with 5 RRHs each, 120 users in the 2 km square.
    pub fn large() -> Self {
        Self::Clustered {
            clusters_x: 5,
            clusters_y: 5,
            cluster_side: 400.0,
            rrh_offset: 100.0,
            users: 120,
        }
    }

    pub fn num_rrhs(&self) -> usize {
        match self {
            Self::Small { .. } => 5,
            Self::Clustered {
                clusters_x,
                clusters_y,
                ..
            } => 5 * clusters_x * clusters_y,
            Self::Custom { rrhs, .. } => rrhs.len(),
        }
    }

    pub fn num_users(&self) -> usize {
        match self {
            Self::Small { users, .. }
            | Self::Clustered { users, .. }
            | Self::Custom { users, .. } => *users,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |msg: &str| Err(ChannelError::InvalidGeometry(msg.to_string()));
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match self {
            Self::Small {
                rrh_side,
                user_side,
                ..
            } => {
                if !positive(*rrh_side) || !positive(*user_side) {
                    return bad("square sides must be positive");
                }
            }
            Self::Clustered {
                clusters_x,
                clusters_y,
                cluster_side,
                rrh_offset,
                ..
            } => {
                if *clusters_x == 0 || *clusters_y == 0 {
                    return bad("cluster grid must be nonempty");
                }
                if !positive(*cluster_side) {
                    return bad("cluster side must be positive");
                }
                if !(rrh_offset.is_finite()
                    && *rrh_offset >= 0.0
                    && *rrh_offset <= cluster_side / 2.0)
                {
                    return bad("RRH offset must lie inside the cluster");
                }
            }
            Self::Custom {
                rrhs, user_region, ..
            } => {
                if rrhs.is_empty() {
                    return bad("at least one RRH is required");
                }
                if !positive(user_region.side) {
                    return bad("user region side must be positive");
                }
                if rrhs.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
                    return bad("RRH coordinates must be finite");
                }
            }
        }
        if self.num_users() == 0 {
            return bad("at least one user is required");
        }
        Ok(())
    }
}

/// Positions and cluster membership of every RRH and user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub rrh_pos: Vec<Point>,
    pub user_pos: Vec<Point>,
    pub cluster_of_rrh: Vec<usize>,
    pub cluster_of_user: Vec<usize>,
    pub num_clusters: usize,
}

impl Topology {
    pub fn num_rrhs(&self) -> usize {
        self.rrh_pos.len()
    }

    pub fn num_users(&self) -> usize {
        self.user_pos.len()
    }

    pub fn rrhs_in(&self, cluster: usize) -> Vec<usize> {
        members(&self.cluster_of_rrh, cluster)
    }

    pub fn users_in(&self, cluster: usize) -> Vec<usize> {
        members(&self.cluster_of_user, cluster)
    }
}

fn members(of: &[usize], cluster: usize) -> Vec<usize> {
    of.iter()
        .enumerate()
        .filter_map(|(i, &c)| (c == cluster).then_some(i))
        .collect()
}

fn cross(center: Point, offset: f64) -> [Point; 5] {
    [
        center,
        Point::new(center.x - offset, center.y - offset),
        Point::new(center.x + offset, center.y - offset),
        Point::new(center.x - offset, center.y + offset),
        Point::new(center.x + offset, center.y + offset),
    ]
}

/// Places RRHs deterministically and users uniformly at random.
pub fn generate_topology(config: &TopologyConfig, seed: u64) -> Result<Topology, ChannelError> {
    config.validate()?;
    let mut rng = stream_rng(seed, TOPOLOGY_STREAM);
    let users = config.num_users();
    match config {
        TopologyConfig::Small {
            rrh_side,
            user_side,
            ..
        } => {
            let region = Square {
                center: Point::new(0.0, 0.0),
                side: *user_side,
            };
            Ok(Topology {
                rrh_pos: cross(region.center, rrh_side / 2.0).to_vec(),
                user_pos: (0..users).map(|_| region.sample(&mut rng)).collect(),
                cluster_of_rrh: vec![0; 5],
                cluster_of_user: vec![0; users],
                num_clusters: 1,
            })
        }
        TopologyConfig::Clustered {
            clusters_x,
            clusters_y,
            cluster_side,
            rrh_offset,
            ..
        } => {
            let (cx, cy, side) = (*clusters_x, *clusters_y, *cluster_side);
            // cluster c = row * clusters_x + col, grid centered on the origin
            let centers: Vec<Point> = (0..cx * cy)
                .map(|c| {
                    let (row, col) = (c / cx, c % cx);
                    Point::new(
                        (col as f64 + 0.5 - cx as f64 / 2.0) * side,
                        (row as f64 + 0.5 - cy as f64 / 2.0) * side,
                    )
                })
                .collect();
            let mut rrh_pos = Vec::with_capacity(5 * centers.len());
            let mut cluster_of_rrh = Vec::with_capacity(5 * centers.len());
            for (c, &center) in centers.iter().enumerate() {
                rrh_pos.extend(cross(center, *rrh_offset));
                cluster_of_rrh.extend([c; 5]);
            }
            let (w, h) = (cx as f64 * side, cy as f64 * side);
            let user_pos: Vec<Point> = (0..users)
                .map(|_| {
                    Point::new(
                        rng.gen_range(-w / 2.0..=w / 2.0),
                        rng.gen_range(-h / 2.0..=h / 2.0),
                    )
                })
                .collect();
            let cluster_of_user = user_pos
                .iter()
                .map(|&p| {
                    centers
                        .iter()
                        .position(|&c| Square { center: c, side }.contains(p))
                        .unwrap_or_else(|| nearest(&centers, p))
                })
                .collect();
            Ok(Topology {
                rrh_pos,
                user_pos,
                cluster_of_rrh,
                cluster_of_user,
                num_clusters: centers.len(),
            })
        }
        TopologyConfig::Custom {
            rrhs, user_region, ..
        } => Ok(Topology {
            rrh_pos: rrhs.clone(),
            user_pos: (0..users).map(|_| user_region.sample(&mut rng)).collect(),
            cluster_of_rrh: vec![0; rrhs.len()],
            cluster_of_user: vec![0; users],
            num_clusters: 1,
        }),
    }
}

fn nearest(centers: &[Point], p: Point) -> usize {
    centers
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.distance(p).total_cmp(&b.1.distance(p)))
        .map(|(i, _)| i)
        .unwrap_or(0)
}
