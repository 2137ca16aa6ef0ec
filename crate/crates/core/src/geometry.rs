//! Planar segment sets with a bounding-volume hierarchy for nearest-point
//! and crossing queries.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Complex64,
    pub b: Complex64,
}

impl Segment {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    /// Closest point parameter in `[0, 1]` and the distance.
    pub fn closest(&self, z: Complex64) -> (f64, f64) {
        let d = self.b - self.a;
        let len2 = d.norm_sqr();
        let t = if len2 > 0.0 {
            (((z - self.a) * d.conj()).re / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let p = self.a + d * t;
        (t, (z - p).norm())
    }

    fn bbox(&self) -> Aabb {
        Aabb {
            lo: Complex64::new(self.a.re.min(self.b.re), self.a.im.min(self.b.im)),
            hi: Complex64::new(self.a.re.max(self.b.re), self.a.im.max(self.b.im)),
        }
    }
}

#[inline]
fn cross(u: Complex64, v: Complex64) -> f64 {
    u.re * v.im - u.im * v.re
}

/// Parameters `(s, t)` of a proper crossing of `p` and `q`: the segments
/// intersect at a single point interior to both.
pub fn proper_crossing(p: &Segment, q: &Segment) -> Option<(f64, f64)> {
    let r = p.b - p.a;
    let s = q.b - q.a;
    let denom = cross(r, s);
    if denom == 0.0 {
        return None;
    }
    let w = q.a - p.a;
    let t = cross(w, s) / denom;
    let u = cross(w, r) / denom;
    if t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0 {
        Some((t, u))
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    lo: Complex64,
    hi: Complex64,
}

impl Aabb {
    fn empty() -> Self {
        Self {
            lo: Complex64::new(f64::INFINITY, f64::INFINITY),
            hi: Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn union(&self, o: &Aabb) -> Aabb {
        Aabb {
            lo: Complex64::new(self.lo.re.min(o.lo.re), self.lo.im.min(o.lo.im)),
            hi: Complex64::new(self.hi.re.max(o.hi.re), self.hi.im.max(o.hi.im)),
        }
    }

    fn dist(&self, z: Complex64) -> f64 {
        let dx = (self.lo.re - z.re).max(0.0).max(z.re - self.hi.re);
        let dy = (self.lo.im - z.im).max(0.0).max(z.im - self.hi.im);
        dx.hypot(dy)
    }

    fn overlaps(&self, o: &Aabb) -> bool {
        self.lo.re <= o.hi.re && o.lo.re <= self.hi.re && self.lo.im <= o.hi.im && o.lo.im <= self.hi.im
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { bbox: Aabb, start: usize, end: usize },
    Inner { bbox: Aabb, left: usize, right: usize },
}

impl Node {
    fn bbox(&self) -> &Aabb {
        match self {
            Node::Leaf { bbox, .. } | Node::Inner { bbox, .. } => bbox,
        }
    }
}

const LEAF_SIZE: usize = 4;

/// Result of a nearest-segment query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub segment: usize,
    /// Position along the segment in `[0, 1]`.
    pub t: f64,
    pub distance: f64,
}

/// A fixed set of segments indexed by a BVH.
#[derive(Debug, Clone)]
pub struct SegmentTree {
    segments: Vec<Segment>,
    /// Permutation: BVH order to original index.
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl SegmentTree {
    pub fn new(segments: Vec<Segment>) -> Self {
        let mut order: Vec<usize> = (0..segments.len()).collect();
        let mut nodes = Vec::new();
        if !segments.is_empty() {
            let n = segments.len();
            build(&segments, &mut order, 0, n, &mut nodes);
        }
        Self { segments, order, nodes }
    }

    /// Segments between consecutive points of each polyline.
    pub fn from_polylines<'a, I>(lines: I) -> Self
    where
        I: IntoIterator<Item = &'a [Complex64]>,
    {
        let mut segs = Vec::new();
        for line in lines {
            for w in line.windows(2) {
                segs.push(Segment::new(w[0], w[1]));
            }
        }
        Self::new(segs)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Closest segment to `z`, `None` for an empty tree.
    pub fn nearest(&self, z: Complex64) -> Option<Nearest> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = Nearest {
            segment: usize::MAX,
            t: 0.0,
            distance: f64::INFINITY,
        };
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i];
            if node.bbox().dist(z) >= best.distance {
                continue;
            }
            match *node {
                Node::Leaf { start, end, .. } => {
                    for &k in &self.order[start..end] {
                        let (t, d) = self.segments[k].closest(z);
                        if d < best.distance || (d == best.distance && k < best.segment) {
                            best = Nearest {
                                segment: k,
                                t,
                                distance: d,
                            };
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    let dl = self.nodes[left].bbox().dist(z);
                    let dr = self.nodes[right].bbox().dist(z);
                    if dl < dr {
                        stack.push(right);
                        stack.push(left);
                    } else {
                        stack.push(left);
                        stack.push(right);
                    }
                }
            }
        }
        Some(best)
    }

    /// Distance from `z` to the nearest segment (infinite when empty).
    pub fn distance(&self, z: Complex64) -> f64 {
        self.nearest(z).map_or(f64::INFINITY, |n| n.distance)
    }

    /// Indices of segments properly crossed by `seg`, ascending.
    pub fn crossings(&self, seg: &Segment) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let bb = seg.bbox();
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i];
            if !node.bbox().overlaps(&bb) {
                continue;
            }
            match *node {
                Node::Leaf { start, end, .. } => {
                    for &k in &self.order[start..end] {
                        if proper_crossing(seg, &self.segments[k]).is_some() {
                            out.push(k);
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn build(segs: &[Segment], order: &mut [usize], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let bbox = order[start..end]
        .iter()
        .fold(Aabb::empty(), |acc, &k| acc.union(&segs[k].bbox()));
    let idx = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { bbox, start, end });
        return idx;
    }
    nodes.push(Node::Leaf { bbox, start, end });
    let wide = bbox.hi.re - bbox.lo.re >= bbox.hi.im - bbox.lo.im;
    let key = |k: usize| {
        let c = segs[k].a + segs[k].b;
        if wide {
            c.re
        } else {
            c.im
        }
    };
    let mid = (start + end) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| key(a).total_cmp(&key(b)));
    let left = build(segs, order, start, mid, nodes);
    let right = build(segs, order, mid, end, nodes);
    nodes[idx] = Node::Inner { bbox, left, right };
    idx
}

/// Even-odd point-in-polygon test for a closed polyline (the last point is
/// joined back to the first).
pub fn point_in_polygon(poly: &[Complex64], z: Complex64) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if z.re < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Bounding box `(lo, hi)` of a point set.
pub fn bounding_box<'a, I: IntoIterator<Item = &'a Complex64>>(pts: I) -> Option<(Complex64, Complex64)> {
    let mut bb = Aabb::empty();
    let mut any = false;
    for p in pts {
        any = true;
        bb = bb.union(&Aabb { lo: *p, hi: *p });
    }
    any.then_some((bb.lo, bb.hi))
}
