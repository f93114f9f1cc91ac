//! Lower convex hulls in Z x Q^k, lambda-components, principal parts and
//! polygon addition.

use std::cmp::Ordering;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ordered_groups::GroupVec;
use crate::Rat;

/// A point (abscissa, ordinate).
pub type Vertex = (usize, GroupVec);

/// Points (s, u) with strictly increasing abscissas; `None` ordinates stand for
/// +infinity and never enter a hull.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cloud {
    pub points: Vec<(usize, Option<GroupVec>)>,
}

impl Cloud {
    pub fn new(points: Vec<(usize, Option<GroupVec>)>) -> Result<Self> {
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Invalid("cloud abscissas must strictly increase".into()));
        }
        Ok(Cloud { points })
    }

    /// Cloud of the sequence of values of a phi-expansion, indexed from 0.
    pub fn from_values(values: Vec<Option<GroupVec>>) -> Self {
        Cloud { points: values.into_iter().enumerate().collect() }
    }

    pub fn finite(&self) -> impl Iterator<Item = (usize, &GroupVec)> {
        self.points.iter().filter_map(|(s, u)| u.as_ref().map(|u| (*s, u)))
    }
}

/// A side or a single vertex of a polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub left: Vertex,
    pub right: Vertex,
}

impl Segment {
    pub fn is_point(&self) -> bool {
        self.left.0 == self.right.0
    }

    pub fn length(&self) -> usize {
        self.right.0 - self.left.0
    }

    pub fn slope(&self) -> Option<GroupVec> {
        if self.is_point() {
            return None;
        }
        let len = Rat::from_integer(self.length().into());
        Some((&self.right.1 - &self.left.1).scale(&len.recip()))
    }
}

/// Lower convex polygon: strictly increasing abscissas and side slopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    pub vertices: Vec<Vertex>,
}

impl Polygon {
    pub fn point(s: usize, u: GroupVec) -> Self {
        Polygon { vertices: vec![(s, u)] }
    }

    pub fn left(&self) -> &Vertex {
        &self.vertices[0]
    }

    pub fn right(&self) -> &Vertex {
        self.vertices.last().expect("polygons are nonempty")
    }

    /// Abscissa length of the polygon.
    pub fn length(&self) -> usize {
        self.right().0 - self.left().0
    }

    pub fn sides(&self) -> Vec<Segment> {
        self.vertices.windows(2).map(|w| Segment { left: w[0].clone(), right: w[1].clone() }).collect()
    }

    pub fn to_json(&self) -> Value {
        let v: Vec<Value> = self.vertices.iter().map(|(s, u)| json!([s, u.to_strings()])).collect();
        json!({ "vertices": v })
    }
}

/// Compare the slope of a->b with the slope of b->c by cross multiplication.
fn turn(a: &Vertex, b: &Vertex, c: &Vertex) -> Ordering {
    let l = (&b.1 - &a.1).scale_int((c.0 - b.0) as i64);
    let r = (&c.1 - &b.1).scale_int((b.0 - a.0) as i64);
    l.cmp(&r)
}

/// Compare slopes of two (length, rise) sides.
fn slope_cmp(a: &(usize, GroupVec), b: &(usize, GroupVec)) -> Ordering {
    a.1.scale_int(b.0 as i64).cmp(&b.1.scale_int(a.0 as i64))
}

/// Lower convex hull by a monotone chain over the finite points.
pub fn lower_hull(c: &Cloud) -> Result<Polygon> {
    let mut hull: Vec<Vertex> = Vec::new();
    for (s, u) in c.finite() {
        let pt = (s, u.clone());
        while hull.len() >= 2 && turn(&hull[hull.len() - 2], &hull[hull.len() - 1], &pt) != Ordering::Less {
            hull.pop();
        }
        hull.push(pt);
    }
    if hull.is_empty() {
        return Err(Error::EmptyCloud);
    }
    Ok(Polygon { vertices: hull })
}

/// The lambda-component: points of N minimizing u + s*lambda.
pub fn lambda_component(n: &Polygon, lambda: &GroupVec) -> Segment {
    let vals: Vec<GroupVec> = n.vertices.iter().map(|(s, u)| u + &lambda.scale_int(*s as i64)).collect();
    let min = vals.iter().min().expect("polygons are nonempty");
    let first = vals.iter().position(|v| v == min).expect("minimum attained");
    let last = vals.iter().rposition(|v| v == min).expect("minimum attained");
    Segment { left: n.vertices[first].clone(), right: n.vertices[last].clone() }
}

/// Sides of slope strictly less than -bound; the left endpoint if none.
pub fn principal_part(n: &Polygon, bound: &GroupVec) -> Polygon {
    let mut vertices = vec![n.vertices[0].clone()];
    for side in n.sides() {
        let len = side.length() as i64;
        let rise = &side.right.1 - &side.left.1;
        if (&rise + &bound.scale_int(len)).cmp(&GroupVec::zero(bound.dim())) != Ordering::Less {
            break;
        }
        vertices.push(side.right);
    }
    Polygon { vertices }
}

/// Minkowski-style sum: left endpoints add, sides merge by increasing slope.
pub fn polygon_add(a: &Polygon, b: &Polygon) -> Polygon {
    let rise = |s: &Segment| (s.length(), &s.right.1 - &s.left.1);
    let mut sides: Vec<(usize, GroupVec)> = a.sides().iter().chain(b.sides().iter()).map(rise).collect();
    sides.sort_by(slope_cmp);
    let mut merged: Vec<(usize, GroupVec)> = Vec::new();
    for s in sides {
        match merged.last_mut() {
            Some(last) if slope_cmp(last, &s) == Ordering::Equal => {
                last.0 += s.0;
                last.1 = &last.1 + &s.1;
            }
            _ => merged.push(s),
        }
    }
    let mut cur = (a.left().0 + b.left().0, &a.left().1 + &b.left().1);
    let mut vertices = vec![cur.clone()];
    for (len, r) in merged {
        cur = (cur.0 + len, &cur.1 + &r);
        vertices.push(cur.clone());
    }
    Polygon { vertices }
}

/// N equals its lambda-component, starts at abscissa 0 and has positive length.
pub fn is_one_sided(n: &Polygon, lambda: &GroupVec) -> bool {
    let c = lambda_component(n, lambda);
    c.left == *n.left() && c.right == *n.right() && n.left().0 == 0 && c.right.0 > 0
}

/// u + s*gamma for any (s, u) of the gamma-component.
pub fn mu_from_polygon(n: &Polygon, gamma: &GroupVec) -> GroupVec {
    let c = lambda_component(n, gamma);
    &c.left.1 + &gamma.scale_int(c.left.0 as i64)
}

/// Value of the polygon at an abscissa inside its range.
pub fn polygon_at(n: &Polygon, s: usize) -> Option<GroupVec> {
    let i = n.vertices.iter().position(|v| v.0 >= s)?;
    let (s1, u1) = &n.vertices[i];
    if *s1 == s {
        return Some(u1.clone());
    }
    let (s0, u0) = &n.vertices[i.checked_sub(1)?];
    let t = Rat::new(((s - s0) as i64).into(), ((s1 - s0) as i64).into());
    Some(u0 + &(u1 - u0).scale(&t))
}

/// Text picture of a cloud and its lower hull. One row per ordinate that
/// occurs (cloud points and hull values at integer abscissas), largest on top,
/// plus an `inf` row for zero coefficients. Vertices are `*`, interior hull
/// points `\`, `-` or `/` by the sign of the side slope, other points `.`.
pub fn render_ascii(c: &Cloud, n: &Polygon) -> String {
    const CELL: usize = 4;
    let (lo, hi) = (n.left().0, n.right().0);
    let width = c.points.iter().map(|p| p.0).chain([hi]).max().unwrap_or(0) + 1;
    let mut rows: Vec<GroupVec> = c.finite().map(|(_, u)| u.clone()).collect();
    rows.extend((lo..=hi).filter_map(|s| polygon_at(n, s)));
    rows.sort();
    rows.dedup();
    rows.reverse();
    let mut labels: Vec<String> = rows.iter().map(|u| u.to_string()).collect();
    let has_inf = c.points.iter().any(|p| p.1.is_none());
    if has_inf {
        labels.insert(0, "inf".into());
    }
    let lw = labels.iter().map(String::len).max().unwrap_or(1);
    let mut grid = vec![vec![' '; width]; labels.len()];
    let off = usize::from(has_inf);
    let row_of = |u: &GroupVec| rows.iter().position(|r| r == u).expect("row exists") + off;
    for (s, u) in &c.points {
        match u {
            Some(u) => grid[row_of(u)][*s] = '.',
            None => grid[0][*s] = '.',
        }
    }
    for side in n.sides() {
        let slope = side.slope().expect("sides have positive length");
        let glyph = match slope.cmp(&GroupVec::zero(slope.dim())) {
            Ordering::Less => '\\',
            Ordering::Equal => '-',
            Ordering::Greater => '/',
        };
        for s in side.left.0 + 1..side.right.0 {
            let u = polygon_at(n, s).expect("inside the polygon");
            grid[row_of(&u)][s] = glyph;
        }
    }
    for (s, u) in &n.vertices {
        grid[row_of(u)][*s] = '*';
    }
    let mut out = String::new();
    for (label, row) in labels.iter().zip(&grid) {
        let cells: String = row.iter().map(|ch| format!("{ch:<CELL$}")).collect();
        out.push_str(format!("{label:>lw$} | {cells}").trim_end());
        out.push('\n');
    }
    out.push_str(&format!("{:>lw$} +-{}\n", "", "-".repeat(width * CELL)));
    let axis: String = (0..width).map(|s| format!("{s:<CELL$}")).collect();
    out.push_str(format!("{:>lw$}   {axis}", "").trim_end());
    out.push('\n');
    out
}
