use super::{on_boundary, smallest_enclosing_circle, Circle, Point, Tolerance};

/// `p ↦ to + R(rotation)·F(p − from)·scale`, where `F` mirrors across the x axis when `reflect`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Similarity {
    pub from: Point,
    pub to: Point,
    pub rotation: f64,
    pub reflect: bool,
    pub scale: f64,
}

impl Similarity {
    pub fn identity() -> Self {
        Similarity { from: Point::ORIGIN, to: Point::ORIGIN, rotation: 0.0, reflect: false, scale: 1.0 }
    }

    pub fn apply(&self, p: Point) -> Point {
        let mut v = p - self.from;
        if self.reflect {
            v.y = -v.y;
        }
        self.to + v.rotate(self.rotation) * self.scale
    }

    /// Map sending `pattern_sec` onto `target_sec`, `anchor` onto `target`.
    pub fn anchored(
        pattern_sec: &Circle,
        anchor: Point,
        target_sec: &Circle,
        target: Point,
        reflect: bool,
    ) -> Self {
        let mut a = anchor - pattern_sec.center;
        if reflect {
            a.y = -a.y;
        }
        let rotation = (target - target_sec.center).angle() - a.angle();
        let scale = if pattern_sec.radius > 0.0 { target_sec.radius / pattern_sec.radius } else { 1.0 };
        Similarity { from: pattern_sec.center, to: target_sec.center, rotation, reflect, scale }
    }
}

/// Greedy eps-matching of two equally sized point sets.
pub(crate) fn sets_match(a: &[Point], b: &[Point], eps: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    'outer: for &p in a {
        for (j, &q) in b.iter().enumerate() {
            if !used[j] && p.dist(q) <= eps {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Every anchor-and-check placement of `pattern` over `q`: one boundary pattern
/// point onto each boundary point of `q`, with and without reflection.
pub(crate) fn anchored_placements(q: &[Point], pattern: &[Point], tol: Tolerance) -> Vec<Similarity> {
    let (Ok(sq), Ok(sp)) = (smallest_enclosing_circle(q, tol), smallest_enclosing_circle(pattern, tol))
    else {
        return Vec::new();
    };
    if sq.radius <= 0.0 || sp.radius <= 0.0 {
        return Vec::new();
    }
    let unit_p = Circle::new(sp.center, sp.radius);
    let anchor = pattern
        .iter()
        .copied()
        .max_by(|a, b| a.dist(sp.center).total_cmp(&b.dist(sp.center)))
        .expect("nonempty");
    let eps_q = tol.eps * sq.radius;
    let mut out = Vec::new();
    for &target in q.iter().filter(|p| on_boundary(**p, &sq, Tolerance { eps: eps_q })) {
        for reflect in [false, true] {
            out.push(Similarity::anchored(&unit_p, anchor, &sq, target, reflect));
        }
    }
    out
}

/// Whether some similarity maps `pattern` onto `q` within eps (relative to `q`'s SEC radius).
pub fn is_similar(q: &[Point], pattern: &[Point], tol: Tolerance) -> bool {
    if q.len() != pattern.len() {
        return false;
    }
    if q.len() <= 2 {
        return true;
    }
    let Ok(sq) = smallest_enclosing_circle(q, tol) else {
        return false;
    };
    let eps_q = tol.eps * sq.radius;
    anchored_placements(q, pattern, tol).iter().any(|t| {
        let placed: Vec<Point> = pattern.iter().map(|&p| t.apply(p)).collect();
        sets_match(&placed, q, eps_q)
    })
}
