use std::collections::HashMap;

use crate::num::{lit, Real};

use super::{EventKind, TrajectoryEvent, TrajectoryRecord};

type Point<T> = (T, T);

fn cross<T: Real>(o: Point<T>, a: Point<T>, b: Point<T>) -> T {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Closest point on segment `[a, b]` to `p`, with its parameter.
fn project<T: Real>(p: Point<T>, a: Point<T>, b: Point<T>) -> (T, Point<T>) {
    let d = (b.0 - a.0, b.1 - a.1);
    let len2 = d.0 * d.0 + d.1 * d.1;
    let u = if len2 == T::zero() {
        T::zero()
    } else {
        (((p.0 - a.0) * d.0 + (p.1 - a.1) * d.1) / len2)
            .max(T::zero())
            .min(T::one())
    };
    (u, (a.0 + u * d.0, a.1 + u * d.1))
}

fn dist<T: Real>(p: Point<T>, q: Point<T>) -> T {
    ((p.0 - q.0) * (p.0 - q.0) + (p.1 - q.1) * (p.1 - q.1)).sqrt()
}

/// Contact between two segments.
struct Contact<T> {
    /// Parameter along the second segment.
    u: T,
    at: Point<T>,
    distance: T,
    proper: bool,
}

/// Proper crossing, or otherwise the closest approach of `[a, b]` and `[c, d]`.
fn contact<T: Real>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> Contact<T> {
    let (o1, o2) = (cross(a, b, c), cross(a, b, d));
    let (o3, o4) = (cross(c, d, a), cross(c, d, b));
    if o1 * o2 < T::zero() && o3 * o4 < T::zero() {
        let u = o1 / (o1 - o2);
        let at = (c.0 + u * (d.0 - c.0), c.1 + u * (d.1 - c.1));
        return Contact {
            u,
            at,
            distance: T::zero(),
            proper: true,
        };
    }
    // Endpoint-to-segment distances cover every non-crossing configuration.
    let mut best: Option<Contact<T>> = None;
    let mut consider = |cand: Contact<T>| {
        if best.as_ref().is_none_or(|b| cand.distance < b.distance) {
            best = Some(cand);
        }
    };
    for (p, on_second, u_if_endpoint) in [
        (a, true, None),
        (b, true, None),
        (c, false, Some(T::zero())),
        (d, false, Some(T::one())),
    ] {
        if on_second {
            let (u, q) = project(p, c, d);
            consider(Contact {
                u,
                at: q,
                distance: dist(p, q),
                proper: false,
            });
        } else {
            let (_, q) = project(p, a, b);
            consider(Contact {
                u: u_if_endpoint.unwrap(),
                at: p,
                distance: dist(p, q),
                proper: false,
            });
        }
    }
    best.unwrap()
}

/// Finds space-time loops in a sampled trajectory.
///
/// The polyline in the `(x, t)` plane is swept segment by segment. A segment
/// closes a loop when it properly crosses an earlier non-adjacent segment, or
/// passes within `eps_event` of one that lies more than `4·eps_event` of arc
/// length behind it. After each closure the earlier part of the path is
/// discarded, so a trajectory that winds around a vortex several times
/// reports one event per turn. Closures within `eps_event` of the previous
/// one are merged.
pub fn detect_self_intersection<T: Real>(
    record: &TrajectoryRecord<T>,
    eps_event: T,
) -> Vec<TrajectoryEvent<T>> {
    let pts: Vec<Point<T>> = record.samples.iter().map(|s| (s.x, s.t)).collect();
    if pts.len() < 3 {
        return Vec::new();
    }
    let nseg = pts.len() - 1;
    let mut arc = Vec::with_capacity(pts.len());
    arc.push(T::zero());
    let mut longest = T::zero();
    for w in pts.windows(2) {
        let l = dist(w[0], w[1]);
        longest = longest.max(l);
        arc.push(*arc.last().unwrap() + l);
    }
    let cell = (longest + eps_event)
        .max(lit::<T>(2.0) * eps_event)
        .max(T::min_positive_value());
    let key = |p: Point<T>| -> (i64, i64) {
        (
            (p.0 / cell).floor().to_i64().unwrap_or(0),
            (p.1 / cell).floor().to_i64().unwrap_or(0),
        )
    };
    let cells_of = |k: usize| -> Vec<(i64, i64)> {
        let (a, b) = (pts[k], pts[k + 1]);
        let lo = key((a.0.min(b.0) - eps_event, a.1.min(b.1) - eps_event));
        let hi = key((a.0.max(b.0) + eps_event, a.1.max(b.1) + eps_event));
        let mut out = Vec::new();
        for i in lo.0..=hi.0 {
            for j in lo.1..=hi.1 {
                out.push((i, j));
            }
        }
        out
    };

    let min_arc = lit::<T>(4.0) * eps_event;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut cut = 0usize;
    let mut events: Vec<TrajectoryEvent<T>> = Vec::new();
    let mut last_hit: Option<Point<T>> = None;

    for j in 0..nseg {
        if j >= 2 && j - 2 >= cut {
            for c in cells_of(j - 2) {
                grid.entry(c).or_default().push(j - 2);
            }
        }
        let mut cands: Vec<usize> = cells_of(j)
            .iter()
            .filter_map(|c| grid.get(c))
            .flatten()
            .copied()
            .collect();
        cands.sort_unstable();
        cands.dedup();
        let hit = cands.into_iter().find_map(|i| {
            let c = contact(pts[i], pts[i + 1], pts[j], pts[j + 1]);
            let closes = c.proper || (c.distance <= eps_event && arc[j] - arc[i + 1] > min_arc);
            closes.then_some(c)
        });
        if let Some(c) = hit {
            let duplicate = last_hit.is_some_and(|p| dist(p, c.at) <= eps_event);
            if !duplicate {
                let s0 = &record.samples[j];
                let s1 = &record.samples[j + 1];
                events.push(TrajectoryEvent {
                    kind: EventKind::SelfIntersection,
                    tau: s0.tau + c.u * (s1.tau - s0.tau),
                    x: c.at.0,
                    t: c.at.1,
                });
            }
            last_hit = Some(c.at);
            cut = j;
            grid.clear();
        }
    }
    events
}
