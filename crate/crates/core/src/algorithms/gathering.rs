use std::cmp::Ordering;

use super::{capability, Branch};
use crate::error::Result;
use crate::geometry::{smallest_enclosing_circle, Point, Tolerance};
use crate::model::Snapshot;

/// Closest other occupied point; ties go to the smaller `(angle, distance)` in the local frame.
fn closest_other(snap: &Snapshot, tol: Tolerance) -> Option<Point> {
    let me = snap.own();
    snap.others().min_by(|a, b| {
        let (da, db) = (a.dist(me), b.dist(me));
        let scale = da.max(db).max(1.0);
        match (Tolerance { eps: tol.eps * scale }).cmp(da, db) {
            Ordering::Equal => (*a - me)
                .angle()
                .total_cmp(&(*b - me).angle())
                .then(da.total_cmp(&db)),
            o => o,
        }
    })
}

pub fn seq_gathering(snap: &Snapshot, tol: Tolerance) -> Result<Point> {
    seq_gathering_branch(snap, tol).map(|x| x.0)
}

pub(crate) fn seq_gathering_branch(snap: &Snapshot, tol: Tolerance) -> Result<(Point, Branch)> {
    let bits = snap
        .multiplicity_bits
        .as_ref()
        .ok_or_else(|| capability("seq-gathering needs weak multiplicity detection"))?;
    let me = snap.own();
    let mine = bits[snap.self_index];
    let flagged: Vec<Point> = snap.points.iter().zip(bits).filter(|(_, b)| **b).map(|(p, _)| *p).collect();
    Ok(match flagged.len() {
        0 => match closest_other(snap, tol) {
            Some(p) => (p, Branch::ToClosest),
            None => (me, Branch::GatherStay),
        },
        1 if mine => (me, Branch::GatherStay),
        1 => (flagged[0], Branch::ToMultiplicity),
        _ if !mine => (me, Branch::GatherStay),
        _ => match closest_other(snap, tol) {
            Some(q) => {
                let scale = q.dist(me);
                let occupied =
                    |z: Point| snap.points.iter().any(|p| p.dist(z) <= tol.eps * scale.max(1.0));
                let mut z = me.midpoint(q);
                let mut guard = 0;
                while occupied(z) && guard < 64 {
                    z = me.midpoint(z);
                    guard += 1;
                }
                (z, Branch::SplitMultiplicity)
            }
            None => (me, Branch::GatherStay),
        },
    })
}

pub fn go_to_center_sec(snap: &Snapshot, tol: Tolerance) -> Point {
    smallest_enclosing_circle(&snap.points, tol)
        .map(|c| c.center)
        .unwrap_or_else(|_| snap.own())
}

pub fn rendezvous(snap: &Snapshot) -> Point {
    if snap.points.len() == 2 {
        snap.points[1 - snap.self_index]
    } else {
        snap.own()
    }
}

pub fn go_to_other(snap: &Snapshot) -> Point {
    closest_other(snap, Tolerance::default()).unwrap_or_else(|| snap.own())
}

pub fn go_to_midpoint(snap: &Snapshot) -> Point {
    closest_other(snap, Tolerance::default())
        .map(|q| snap.own().midpoint(q))
        .unwrap_or_else(|| snap.own())
}
