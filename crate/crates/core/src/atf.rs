//! Almost-toric base diagrams: nodes with eigenlines through the origin and
//! branch cuts, moved by nodal slides, cut transfers and linear maps.
//!
//! Moves act on the stored data. Two diagrams are equal when their canonical
//! forms agree: nodes sorted by position, each direction oriented away from
//! the origin (the cut sign flipped along with it, so the cut ray is
//! unchanged).

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::birmap::{Generator, Word};
use crate::cy2::Surface;
use crate::lattice::{complement_matrix, LatticeVector, UnimodularMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtfError {
    #[error("node index {0} out of range")]
    BadIndex(usize),
    #[error("target {1} is not on the eigenline of node {0}")]
    OffEigenline(usize, Box<Point>),
    #[error("slide of node {node} is blocked by node {by}")]
    Blocked { node: usize, by: usize },
    #[error("invalid node: {0}")]
    InvalidNode(String),
    #[error("two nodes at {0}")]
    SharedPosition(Box<Point>),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("malformed diagram JSON: {0}")]
    Json(String),
}

/// A rational point of the plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: BigRational,
    pub y: BigRational,
}

impl Point {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Point { x, y }
    }

    pub fn lattice(v: &LatticeVector) -> Self {
        Point { x: int(v.x), y: int(v.y) }
    }

    pub fn is_origin(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// `det(self, v)`; zero iff the point lies on the line R·v.
    fn det(&self, v: &LatticeVector) -> BigRational {
        &self.x * int(v.y) - &self.y * int(v.x)
    }

    /// Coordinate along `v` for a point on the line R·v.
    fn along(&self, v: &LatticeVector) -> BigRational {
        (&self.x * int(v.x) + &self.y * int(v.y)) / int(v.dot(v))
    }

    fn apply(&self, m: &UnimodularMatrix) -> Self {
        let [a, b, c, d] = m.entries();
        Point { x: int(a) * &self.x + int(b) * &self.y, y: int(c) * &self.x + int(d) * &self.y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

fn int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

fn ratio_text(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn parse_ratio(s: &str) -> Result<BigRational, AtfError> {
    let bad = || AtfError::Json(format!("bad rational {s:?}"));
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// `C⁻¹·(1,0;1,1)·C` with `C = complement_matrix(direction)`.
pub fn monodromy(direction: &LatticeVector) -> UnimodularMatrix {
    let c = complement_matrix(direction).expect("node directions are primitive");
    c.inverse() * UnimodularMatrix::lower_shear(1) * c
}

/// A focus-focus node of the fibration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    position: Point,
    direction: LatticeVector,
    cut_sign: i8,
}

impl Node {
    pub fn new(position: Point, direction: LatticeVector, cut_sign: i8) -> Result<Node, AtfError> {
        if !direction.is_primitive() {
            return Err(AtfError::InvalidNode(format!("direction {direction} is not primitive")));
        }
        if cut_sign != 1 && cut_sign != -1 {
            return Err(AtfError::InvalidNode(format!("cut sign {cut_sign}")));
        }
        if position.is_origin() || !position.det(&direction).is_zero() {
            return Err(AtfError::InvalidNode(format!("position {position} is not on the eigenline of {direction}")));
        }
        Ok(Node { position, direction, cut_sign })
    }

    pub fn position(&self) -> &Point {
        &self.position
    }

    pub fn direction(&self) -> LatticeVector {
        self.direction
    }

    pub fn cut_sign(&self) -> i8 {
        self.cut_sign
    }

    pub fn monodromy(&self) -> UnimodularMatrix {
        monodromy(&self.direction)
    }

    /// Direction of the cut ray leaving the node.
    pub fn cut_direction(&self) -> LatticeVector {
        self.direction.scale(self.cut_sign as i64)
    }

    /// Same node with the direction pointing away from the origin.
    fn oriented(&self) -> Node {
        if self.position.along(&self.direction).is_negative() {
            Node { position: self.position.clone(), direction: -self.direction, cut_sign: -self.cut_sign }
        } else {
            self.clone()
        }
    }

    fn mapped(&self, m: &UnimodularMatrix) -> Node {
        Node { position: self.position.apply(m), direction: m.apply(&self.direction), cut_sign: self.cut_sign }
    }
}

/// An almost-toric base diagram on the whole plane.
#[derive(Clone, Debug, Eq)]
pub struct BaseDiagram {
    nodes: Vec<Node>,
}

impl PartialEq for BaseDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.canonical().nodes == other.canonical().nodes
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeJson {
    position: [String; 2],
    direction: LatticeVector,
    cut_sign: i8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramJson {
    nodes: Vec<NodeJson>,
}

impl BaseDiagram {
    pub fn new(nodes: Vec<Node>) -> Result<BaseDiagram, AtfError> {
        for (i, n) in nodes.iter().enumerate() {
            if nodes[..i].iter().any(|o| o.position == n.position) {
                return Err(AtfError::SharedPosition(Box::new(n.position.clone())));
            }
        }
        Ok(BaseDiagram { nodes })
    }

    pub fn empty() -> BaseDiagram {
        BaseDiagram { nodes: Vec::new() }
    }

    /// One node at `j·n` for each ray `n` and `1 ≤ j ≤ m_n`, cut away from the origin.
    pub fn from_surface(s: &Surface) -> BaseDiagram {
        let nodes = s
            .pairs()
            .flat_map(|(n, m)| {
                (1..=m as i64).map(move |j| Node { position: Point::lattice(&n.scale(j)), direction: n, cut_sign: 1 })
            })
            .collect();
        BaseDiagram { nodes }.canonical()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn canonical(&self) -> BaseDiagram {
        let mut nodes: Vec<Node> = self.nodes.iter().map(Node::oriented).collect();
        nodes.sort_by(|a, b| a.position.cmp(&b.position));
        BaseDiagram { nodes }
    }

    pub fn find(&self, p: &Point) -> Option<usize> {
        self.nodes.iter().position(|n| &n.position == p)
    }

    fn node(&self, i: usize) -> Result<&Node, AtfError> {
        self.nodes.get(i).ok_or(AtfError::BadIndex(i))
    }

    /// Moves node `i` along its eigenline to `target`.
    pub fn nodal_slide(&self, i: usize, target: &Point) -> Result<BaseDiagram, AtfError> {
        let node = self.node(i)?;
        let dir = node.direction;
        if target.is_origin() || !target.det(&dir).is_zero() {
            return Err(AtfError::OffEigenline(i, Box::new(target.clone())));
        }
        let (t0, t1) = (node.position.along(&dir), target.along(&dir));
        let (lo, hi) = if t0 < t1 { (&t0, &t1) } else { (&t1, &t0) };
        for (j, other) in self.nodes.iter().enumerate() {
            if j == i || !other.position.det(&dir).is_zero() {
                continue;
            }
            let t = other.position.along(&dir);
            if &t >= lo && &t <= hi {
                return Err(AtfError::Blocked { node: i, by: j });
            }
        }
        let mut out = self.clone();
        out.nodes[i].position = target.clone();
        Ok(out)
    }

    /// Moves the cut of node `i` to the opposite side. With direction `d` and
    /// cut sign `s`, every node strictly inside `{(K·v)₁ < 0}` (`K` the
    /// complement matrix of `d`) is moved by `M_d^{-s}`.
    pub fn cut_transfer(&self, i: usize) -> Result<BaseDiagram, AtfError> {
        let node = self.node(i)?;
        let k = complement_matrix(&node.direction).expect("primitive direction");
        let m = node.monodromy();
        let shear = if node.cut_sign > 0 { m.inverse() } else { m };
        let [a, b, _, _] = k.entries();
        let mut out = self.clone();
        for n in out.nodes.iter_mut() {
            let side = int(a) * &n.position.x + int(b) * &n.position.y;
            if side.is_negative() {
                *n = n.mapped(&shear);
            }
        }
        out.nodes[i].cut_sign = -out.nodes[i].cut_sign;
        Ok(out)
    }

    /// Maps positions and directions by `a`; cut signs are kept.
    pub fn apply_linear(&self, a: &UnimodularMatrix) -> BaseDiagram {
        BaseDiagram { nodes: self.nodes.iter().map(|n| n.mapped(a)).collect() }
    }

    fn standard_index(&self, v: &LatticeVector, j: i64) -> Option<usize> {
        self.find(&Point::lattice(&v.scale(j)))
    }

    /// Number of nodes at `n, 2n, 3n, …` without gaps.
    fn run_length(&self, n: &LatticeVector) -> i64 {
        (1..).take_while(|&j| self.standard_index(n, j).is_some()).count() as i64
    }

    fn slide_to(&self, from: &LatticeVector, j: i64, to: &LatticeVector, k: i64) -> Result<BaseDiagram, AtfError> {
        let i = self.standard_index(from, j).expect("node located by run_length");
        self.nodal_slide(i, &Point::lattice(&to.scale(k)))
    }

    /// On a canonical diagram: the node at `v` has its cut pointing away
    /// from the origin.
    fn require_outward_cut(&self, v: &LatticeVector) -> Result<(), AtfError> {
        let i = self.standard_index(v, 1).expect("caller checked presence");
        if self.nodes[i].cut_sign > 0 {
            Ok(())
        } else {
            Err(AtfError::PreconditionFailed(format!("the cut at {v} points toward the origin")))
        }
    }

    /// Mirror of `E_n`: outward slides on the `-n` side, the node at `n`
    /// through the origin to `-n`, inward slides on the `n` side, then a
    /// cut transfer at the node now at `-n`.
    pub fn elementary_move(&self, n: &LatticeVector) -> Result<BaseDiagram, AtfError> {
        let n = n.primitive().map_err(|e| AtfError::PreconditionFailed(e.to_string()))?;
        let mut d = self.canonical();
        let (plus, minus) = (d.run_length(&n), d.run_length(&-n));
        if plus == 0 {
            return Err(AtfError::PreconditionFailed(format!("no node at {n}")));
        }
        d.require_outward_cut(&n)?;
        for j in (1..=minus).rev() {
            d = d.slide_to(&-n, j, &-n, j + 1)?;
        }
        d = d.slide_to(&n, 1, &-n, 1)?;
        for j in 2..=plus {
            d = d.slide_to(&n, j, &n, j - 1)?;
        }
        let i = d.standard_index(&-n, 1).expect("node just slid there");
        d.cut_transfer(i)
    }

    /// Mirror of `E_n⁻¹`: the steps of [`Self::elementary_move`] undone in
    /// reverse order.
    pub fn inverse_elementary_move(&self, n: &LatticeVector) -> Result<BaseDiagram, AtfError> {
        let n = n.primitive().map_err(|e| AtfError::PreconditionFailed(e.to_string()))?;
        let mut d = self.canonical();
        let (plus, minus) = (d.run_length(&n), d.run_length(&-n));
        if minus == 0 {
            return Err(AtfError::PreconditionFailed(format!("no node at {}", -n)));
        }
        d.require_outward_cut(&-n)?;
        let i = d.standard_index(&-n, 1).expect("counted by run_length");
        // present the node as the forward move leaves it: direction n, cut toward -n
        let node = &mut d.nodes[i];
        node.direction = n;
        node.cut_sign = -1;
        d = d.cut_transfer(i)?;
        for j in (1..=plus).rev() {
            d = d.slide_to(&n, j, &n, j + 1)?;
        }
        d = d.slide_to(&-n, 1, &n, 1)?;
        for j in 2..=minus {
            d = d.slide_to(&-n, j, &-n, j - 1)?;
        }
        Ok(d)
    }

    /// Applies a word letter by letter, innermost first; linear letters act
    /// by their lattice action.
    pub fn apply_word(&self, w: &Word) -> Result<BaseDiagram, AtfError> {
        let mut d = self.clone();
        for l in w.letters().iter().rev() {
            d = match l.generator {
                Generator::Linear(_) => {
                    let m = l.tropicalize().matrix_at(&LatticeVector::new(1, 0));
                    d.apply_linear(&m)
                }
                Generator::Elementary(n) if l.inverse => d.inverse_elementary_move(&n)?,
                Generator::Elementary(n) => d.elementary_move(&n)?,
            };
        }
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        let raw = DiagramJson {
            nodes: self
                .canonical()
                .nodes
                .iter()
                .map(|n| NodeJson {
                    position: [ratio_text(&n.position.x), ratio_text(&n.position.y)],
                    direction: n.direction,
                    cut_sign: n.cut_sign,
                })
                .collect(),
        };
        serde_json::to_string(&raw).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<BaseDiagram, AtfError> {
        let raw: DiagramJson = serde_json::from_str(text).map_err(|e| AtfError::Json(e.to_string()))?;
        let nodes = raw
            .nodes
            .into_iter()
            .map(|n| {
                let p = Point::new(parse_ratio(&n.position[0])?, parse_ratio(&n.position[1])?);
                Node::new(p, n.direction, n.cut_sign)
            })
            .collect::<Result<Vec<_>, _>>()?;
        BaseDiagram::new(nodes)
    }

    /// Deterministic SVG drawing: eigenline segments, dashed cuts, a cross
    /// per node and a dot at the origin.
    pub fn render_svg(&self) -> String {
        let d = self.canonical();
        let pts: Vec<(f64, f64)> = d.nodes.iter().map(|n| (f(&n.position.x), f(&n.position.y))).collect();
        let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for (x, y) in &pts {
            x0 = x0.min(*x);
            x1 = x1.max(*x);
            y0 = y0.min(*y);
            y1 = y1.max(*y);
        }
        let (x0, x1, y0, y1) = (x0 - 1.0, x1 + 1.0, y0 - 1.0, y1 + 1.0);
        let mut s = String::new();
        // y is flipped so the lattice reads upward
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
            num(x0),
            num(-y1),
            num(x1 - x0),
            num(y1 - y0)
        )
        .unwrap();
        let sw = 0.04;
        let clip = |px: f64, py: f64, dx: f64, dy: f64| -> (f64, f64) {
            let mut t = f64::INFINITY;
            if dx > 0.0 {
                t = t.min((x1 - px) / dx);
            } else if dx < 0.0 {
                t = t.min((x0 - px) / dx);
            }
            if dy > 0.0 {
                t = t.min((y1 - py) / dy);
            } else if dy < 0.0 {
                t = t.min((y0 - py) / dy);
            }
            (px + t * dx, py + t * dy)
        };
        for (n, (px, py)) in d.nodes.iter().zip(&pts) {
            let (dx, dy) = (n.direction.x as f64, n.direction.y as f64);
            writeln!(s, r#"<line class="eigenline" x1="0" y1="0" x2="{}" y2="{}" stroke="black" stroke-width="{sw}"/>"#, num(*px), num(-py)).unwrap();
            let sign = n.cut_sign as f64;
            let (ex, ey) = clip(*px, *py, sign * dx, sign * dy);
            writeln!(
                s,
                r#"<line class="cut" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="{sw}" stroke-dasharray="0.15,0.1"/>"#,
                num(*px),
                num(-py),
                num(ex),
                num(-ey)
            )
            .unwrap();
        }
        for (px, py) in &pts {
            let r = 0.12;
            writeln!(
                s,
                r#"<path class="node" d="M {} {} L {} {} M {} {} L {} {}" stroke="black" stroke-width="{}"/>"#,
                num(px - r),
                num(-py - r),
                num(px + r),
                num(-py + r),
                num(px - r),
                num(-py + r),
                num(px + r),
                num(-py - r),
                2.0 * sw
            )
            .unwrap();
        }
        writeln!(s, r#"<circle class="origin" cx="0" cy="0" r="0.08" fill="black"/>"#).unwrap();
        s.push_str("</svg>\n");
        s
    }
}

fn f(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// The diagram of a surface: its interior blow-ups as nodes.
pub fn diagram(s: &Surface) -> BaseDiagram {
    BaseDiagram::from_surface(s)
}

/// Segments `(i·n, (i+1)·n)` for `1 ≤ i < m_n`, one per visible Lagrangian sphere.
pub fn visible_spheres(s: &Surface) -> Vec<(LatticeVector, LatticeVector)> {
    s.pairs().flat_map(|(n, m)| (1..m as i64).map(move |i| (n.scale(i), n.scale(i + 1)))).collect()
}

impl fmt::Display for BaseDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}
