//! Social group detection and group statistics.
//!
//! Two pedestrians are linked in a frame when they walk close together at a
//! similar speed and heading. A pair linked in enough of the frames where
//! both are visible is "together", and groups are the connected components
//! of that relation.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::geom::{angle_diff_deg, hull_area, Point};
use crate::scene::{Scene, SceneFrame};
use crate::social::SOCIAL_SPACE;

/// Speed that maps to a full speed score, m/s.
pub const SPEED_SCORE_CAP: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum GroupingError {
    #[error("group members {0:?} are never visible together")]
    DegenerateGroup(Vec<u32>),
    #[error("invalid grouping parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupLinkParams {
    /// Meters.
    pub max_distance: f64,
    /// Meters per second.
    pub max_speed_diff: f64,
    /// Degrees.
    pub max_heading_diff: f64,
    /// Fraction of co-visible frames in which a pair must be linked.
    pub min_persistence: f64,
}

impl Default for GroupLinkParams {
    fn default() -> Self {
        Self {
            max_distance: 1.2,
            max_speed_diff: 0.5,
            max_heading_diff: 30.0,
            min_persistence: 0.5,
        }
    }
}

impl GroupLinkParams {
    pub fn validate(&self) -> Result<(), GroupingError> {
        let positive = [self.max_distance, self.max_speed_diff, self.max_heading_diff]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !positive {
            return Err(GroupingError::InvalidParams("thresholds must be positive".into()));
        }
        if !(self.min_persistence > 0.0 && self.min_persistence <= 1.0) {
            return Err(GroupingError::InvalidParams("min_persistence must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupFrameMetrics {
    pub frame: u32,
    pub members_present: usize,
    pub mean_distance: f64,
    pub area: f64,
    pub mean_angular_variation: f64,
    pub mean_speed_mps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupAggregates {
    /// Meters.
    pub mean_distance: f64,
    /// [0, 100].
    pub cohesion: f64,
    /// Square meters.
    pub mean_area: f64,
    /// [0, 100].
    pub orientation_score: f64,
    /// [0, 100].
    pub speed_score: f64,
    pub mean_angular_variation: f64,
    pub mean_speed_mps: f64,
    pub per_frame: Vec<GroupFrameMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub id: usize,
    /// Ascending, at least two.
    pub members: Vec<u32>,
    pub metrics: GroupAggregates,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroupSet {
    pub groups: Vec<Group>,
    pub grouped_ids: BTreeSet<u32>,
    pub ungrouped_ids: BTreeSet<u32>,
}

impl GroupSet {
    pub fn group_of(&self, id: u32) -> Option<&Group> {
        self.groups.iter().find(|g| g.members.binary_search(&id).is_ok())
    }

    /// Member sets, for comparing partitions.
    pub fn partition(&self) -> BTreeSet<BTreeSet<u32>> {
        self.groups.iter().map(|g| g.members.iter().copied().collect()).collect()
    }
}

/// Pairs `(i, j)` with `i < j` linked in this frame.
pub fn frame_links(frame: &SceneFrame, params: &GroupLinkParams) -> Vec<(u32, u32)> {
    let peds = &frame.pedestrians;
    let mut links = Vec::new();
    for (a, (ia, sa)) in peds.iter().enumerate() {
        for (ib, sb) in &peds[a + 1..] {
            let close = sa.position.distance(sb.position) <= params.max_distance;
            let same_pace = (sa.speed_mps - sb.speed_mps).abs() <= params.max_speed_diff;
            let same_way = angle_diff_deg(sa.heading, sb.heading) <= params.max_heading_diff;
            if close && same_pace && same_way {
                links.push((*ia, *ib));
            }
        }
    }
    links
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller index wins so roots are deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[derive(Default, Clone, Copy)]
struct PairCounts {
    together: u32,
    linked: u32,
}

/// Co-present pairs and linked pairs of one frame.
type FramePairs = (Vec<(u32, u32)>, Vec<(u32, u32)>);

pub fn detect_groups(scene: &Scene, params: &GroupLinkParams) -> Result<GroupSet, GroupingError> {
    params.validate()?;
    let per_frame: Vec<FramePairs> = scene
        .frames
        .par_iter()
        .map(|f| {
            let ids: Vec<u32> = f.pedestrians.iter().map(|(id, _)| *id).collect();
            let pairs = ids
                .iter()
                .enumerate()
                .flat_map(|(k, &a)| ids[k + 1..].iter().map(move |&b| (a, b)))
                .collect();
            (pairs, frame_links(f, params))
        })
        .collect();

    let mut counts: BTreeMap<(u32, u32), PairCounts> = BTreeMap::new();
    for (pairs, links) in &per_frame {
        for p in pairs {
            counts.entry(*p).or_default().together += 1;
        }
        for p in links {
            counts.entry(*p).or_default().linked += 1;
        }
    }

    let ids: Vec<u32> = scene.ids().collect();
    let index: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
    let mut sets = DisjointSet::new(ids.len());
    for (&(a, b), c) in &counts {
        if c.together > 0 && f64::from(c.linked) >= params.min_persistence * f64::from(c.together) {
            sets.union(index[&a], index[&b]);
        }
    }

    let mut components: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for (k, &id) in ids.iter().enumerate() {
        let root = sets.find(k);
        components.entry(root).or_default().push(id);
    }
    let mut member_lists: Vec<Vec<u32>> = components.into_values().filter(|m| m.len() >= 2).collect();
    member_lists.sort_by_key(|m| m[0]);

    let mut set = GroupSet::default();
    for (gid, members) in member_lists.into_iter().enumerate() {
        let metrics = group_metrics(&members, scene)?;
        set.grouped_ids.extend(members.iter().copied());
        set.groups.push(Group {
            id: gid,
            members,
            metrics,
        });
    }
    set.ungrouped_ids = ids.iter().copied().filter(|id| !set.grouped_ids.contains(id)).collect();
    Ok(set)
}

pub fn cohesion_score(mean_distance: f64) -> f64 {
    100.0 * (1.0 - mean_distance / SOCIAL_SPACE).max(0.0)
}

pub fn orientation_score(mean_angular_variation: f64) -> f64 {
    100.0 * (1.0 - mean_angular_variation.clamp(0.0, 180.0) / 180.0)
}

pub fn speed_score(mean_speed_mps: f64) -> f64 {
    100.0 * (mean_speed_mps.max(0.0) / SPEED_SCORE_CAP).min(1.0)
}

/// Per-frame and aggregated statistics over the frames where at least two
/// members are visible.
pub fn group_metrics(members: &[u32], scene: &Scene) -> Result<GroupAggregates, GroupingError> {
    let per_frame: Vec<GroupFrameMetrics> = scene
        .frames
        .iter()
        .filter_map(|f| {
            let present: Vec<_> = members.iter().filter_map(|&id| f.get(id)).collect();
            if present.len() < 2 {
                return None;
            }
            let positions: Vec<Point> = present.iter().map(|s| s.position).collect();
            let mut dist_sum = 0.0;
            let mut pairs = 0usize;
            for (k, a) in positions.iter().enumerate() {
                for b in &positions[k + 1..] {
                    dist_sum += a.distance(*b);
                    pairs += 1;
                }
            }
            let n = present.len() as f64;
            Some(GroupFrameMetrics {
                frame: f.frame,
                members_present: present.len(),
                mean_distance: dist_sum / pairs as f64,
                area: hull_area(&positions),
                mean_angular_variation: present.iter().map(|s| s.angular_variation).sum::<f64>() / n,
                mean_speed_mps: present.iter().map(|s| s.speed_mps).sum::<f64>() / n,
            })
        })
        .collect();
    if per_frame.is_empty() {
        return Err(GroupingError::DegenerateGroup(members.to_vec()));
    }
    let n = per_frame.len() as f64;
    let avg = |f: fn(&GroupFrameMetrics) -> f64| per_frame.iter().map(f).sum::<f64>() / n;
    let mean_distance = avg(|m| m.mean_distance);
    let mean_angular_variation = avg(|m| m.mean_angular_variation);
    let mean_speed_mps = avg(|m| m.mean_speed_mps);
    Ok(GroupAggregates {
        mean_distance,
        cohesion: cohesion_score(mean_distance),
        mean_area: avg(|m| m.area),
        orientation_score: orientation_score(mean_angular_variation),
        speed_score: speed_score(mean_speed_mps),
        mean_angular_variation,
        mean_speed_mps,
        per_frame,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::KinematicSample;
    use crate::tracking::{PedestrianTrack, TrackPoint, TrackingDataset, Unit};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sample(x: f64, y: f64, speed_mps: f64, heading: f64) -> KinematicSample {
        KinematicSample {
            frame: 0,
            position: Point::new(x, y),
            speed: speed_mps / 25.0,
            speed_mps,
            heading,
            angular_variation: 0.0,
        }
    }

    fn frame(peds: Vec<KinematicSample>) -> SceneFrame {
        SceneFrame {
            frame: 0,
            pedestrians: peds.into_iter().enumerate().map(|(k, s)| (k as u32, s)).collect(),
        }
    }

    /// Straight walkers: (id, start x, start y, vx, vy) in meters per frame.
    fn scene_of(walkers: &[(u32, f64, f64, f64, f64)], frames: u32) -> Scene {
        let mut ds = TrackingDataset::empty(Unit::Meters);
        for &(id, x, y, vx, vy) in walkers {
            let points = (0..frames)
                .map(|f| TrackPoint {
                    frame: f,
                    x: x + vx * f as f64,
                    y: y + vy * f as f64,
                })
                .collect();
            ds.tracks.insert(id, PedestrianTrack { id, points });
        }
        ds.frame_count = frames;
        Scene::build(&ds, 25.0).unwrap()
    }

    #[test]
    fn link_predicates() {
        let p = GroupLinkParams::default();
        let side_by_side = frame(vec![sample(0.0, 0.0, 1.2, 0.0), sample(0.0, 0.8, 1.2, 0.0)]);
        assert_eq!(frame_links(&side_by_side, &p), vec![(0, 1)]);

        let opposite = frame(vec![sample(0.0, 0.0, 1.2, 0.0), sample(0.0, 0.8, 1.2, 180.0)]);
        assert!(frame_links(&opposite, &p).is_empty());

        let far = frame(vec![sample(0.0, 0.0, 1.2, 0.0), sample(0.0, 3.0, 1.2, 0.0)]);
        assert!(frame_links(&far, &p).is_empty());

        let heading_wrap = frame(vec![sample(0.0, 0.0, 1.2, 355.0), sample(0.0, 0.8, 1.2, 10.0)]);
        assert_eq!(frame_links(&heading_wrap, &p).len(), 1);
    }

    #[test]
    fn stationary_far_apart_has_no_groups() {
        let scene = scene_of(&[(0, 0.0, 0.0, 0.0, 0.0), (1, 10.0, 0.0, 0.0, 0.0), (2, 0.0, 10.0, 0.0, 0.0)], 20);
        let set = detect_groups(&scene, &GroupLinkParams::default()).unwrap();
        assert!(set.groups.is_empty());
        assert_eq!(set.ungrouped_ids.len(), 3);
    }

    #[test]
    fn chain_links_form_one_group() {
        // A-B 1.0 m apart, B-C 1.0 m apart, A-C 2.0 m apart
        let scene = scene_of(
            &[(0, 0.0, 0.0, 0.05, 0.0), (1, 0.0, 1.0, 0.05, 0.0), (2, 0.0, 2.0, 0.05, 0.0), (7, 0.0, 20.0, -0.05, 0.0)],
            30,
        );
        let set = detect_groups(&scene, &GroupLinkParams::default()).unwrap();
        assert_eq!(set.groups.len(), 1);
        assert_eq!(set.groups[0].members, vec![0, 1, 2]);
        assert_eq!(set.ungrouped_ids, BTreeSet::from([7]));
        assert!(set.group_of(1).is_some());
        assert!(set.group_of(7).is_none());
    }

    #[test]
    fn group_ids_follow_smallest_member() {
        let scene = scene_of(
            &[
                (5, 0.0, 0.0, 0.05, 0.0),
                (6, 0.0, 0.7, 0.05, 0.0),
                (1, 0.0, 10.0, 0.05, 0.0),
                (9, 0.0, 10.7, 0.05, 0.0),
            ],
            30,
        );
        let set = detect_groups(&scene, &GroupLinkParams::default()).unwrap();
        assert_eq!(set.groups[0].members, vec![1, 9]);
        assert_eq!(set.groups[1].members, vec![5, 6]);
        assert_eq!(set.groups[1].id, 1);
    }

    #[test]
    fn right_triangle_metrics() {
        let scene = scene_of(&[(0, 0.0, 0.0, 0.0, 0.0), (1, 1.0, 0.0, 0.0, 0.0), (2, 0.0, 1.0, 0.0, 0.0)], 3);
        let m = group_metrics(&[0, 1, 2], &scene).unwrap();
        assert_abs_diff_eq!(m.mean_area, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m.mean_distance, (2.0 + 2f64.sqrt()) / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.mean_distance, 1.1381, epsilon = 1e-4);
    }

    #[test]
    fn score_endpoints() {
        assert_eq!(cohesion_score(3.6), 0.0);
        assert_eq!(cohesion_score(0.0), 100.0);
        assert_eq!(cohesion_score(10.0), 0.0);
        assert_eq!(orientation_score(0.0), 100.0);
        assert_eq!(speed_score(1.0), 50.0);
        assert_eq!(speed_score(5.0), 100.0);
    }

    #[test]
    fn straight_marching_group_scores() {
        // 1.0 m/s at 25 fps
        let scene = scene_of(&[(0, 0.0, 0.0, 0.04, 0.0), (1, 0.0, 0.8, 0.04, 0.0)], 25);
        let m = group_metrics(&[0, 1], &scene).unwrap();
        assert_abs_diff_eq!(m.orientation_score, 100.0);
        assert_abs_diff_eq!(m.speed_score, 50.0, epsilon = 1e-9);
    }

    #[test]
    fn never_co_present_is_degenerate() {
        let mut ds = TrackingDataset::empty(Unit::Meters);
        for (id, start) in [(0u32, 0u32), (1, 10)] {
            let points = (start..start + 5).map(|f| TrackPoint { frame: f, x: 0.0, y: 0.0 }).collect();
            ds.tracks.insert(id, PedestrianTrack { id, points });
        }
        let scene = Scene::build(&ds, 25.0).unwrap();
        assert_eq!(group_metrics(&[0, 1], &scene), Err(GroupingError::DegenerateGroup(vec![0, 1])));
    }

    #[test]
    fn invalid_params() {
        let p = GroupLinkParams {
            min_persistence: 0.0,
            ..GroupLinkParams::default()
        };
        assert!(p.validate().is_err());
    }

    proptest! {
        #[test]
        fn scores_in_range(d in -1.0..100.0f64, a in -10.0..400.0f64, v in -1.0..50.0f64) {
            prop_assert!((0.0..=100.0).contains(&cohesion_score(d.max(0.0))));
            prop_assert!((0.0..=100.0).contains(&orientation_score(a)));
            prop_assert!((0.0..=100.0).contains(&speed_score(v)));
        }

        #[test]
        fn partition_is_disjoint_and_covering(
            walkers in prop::collection::vec((0.0..6.0f64, 0.0..6.0f64, -0.06..0.06f64, -0.06..0.06f64), 1..10)
        ) {
            let w: Vec<_> = walkers.iter().enumerate().map(|(k, &(x, y, vx, vy))| (k as u32, x, y, vx, vy)).collect();
            let scene = scene_of(&w, 15);
            let set = detect_groups(&scene, &GroupLinkParams::default()).unwrap();
            prop_assert!(set.grouped_ids.is_disjoint(&set.ungrouped_ids));
            prop_assert_eq!(set.grouped_ids.len() + set.ungrouped_ids.len(), w.len());
            let total: usize = set.groups.iter().map(|g| g.members.len()).sum();
            prop_assert_eq!(total, set.grouped_ids.len());
            for g in &set.groups {
                prop_assert!(g.members.len() >= 2);
                prop_assert!((0.0..=100.0).contains(&g.metrics.cohesion));
                prop_assert!((0.0..=100.0).contains(&g.metrics.orientation_score));
                prop_assert!((0.0..=100.0).contains(&g.metrics.speed_score));
            }
        }
    }
}
