//! Polylines sampled from mesh loops, arc-length resampling and frontal
//! projection.

use nalgebra::{SVector, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// An ordered polyline in `D` dimensions with at least two finite points.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve<const D: usize> {
    points: Vec<SVector<f64, D>>,
}

pub type Curve3 = Curve<3>;
pub type Curve2 = Curve<2>;

impl<const D: usize> Curve<D> {
    pub fn new(points: Vec<SVector<f64, D>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(format!(
                "a curve needs at least 2 points, got {}",
                points.len()
            )));
        }
        if !points.iter().flatten().all(|c| c.is_finite()) {
            return Err(Error::Domain("curve has non-finite coordinates".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[SVector<f64, D>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn arc_length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    /// Applies `f` to every point.
    pub fn map<const E: usize>(&self, f: impl Fn(&SVector<f64, D>) -> SVector<f64, E>) -> Result<Curve<E>> {
        Curve::new(self.points.iter().map(f).collect())
    }
}

/// Mesh positions of `lp`, in loop order.
pub fn extract_loop_curve(mesh: &Mesh, lp: &[usize]) -> Result<Curve3> {
    let len = mesh.vertex_count();
    let points = lp
        .iter()
        .map(|&v| {
            mesh.vertices
                .get(v)
                .copied()
                .ok_or(Error::IndexOutOfRange { index: v, len })
        })
        .collect::<Result<Vec<Vector3<f64>>>>()?;
    Curve::new(points)
}

/// Resamples a polyline to `k` points equally spaced in arc length.
///
/// Point `i` lies at arc length `i * L / (k - 1)`, interpolated linearly
/// within its segment. The first and last input points are copied exactly.
pub fn resample_by_arclength<const D: usize>(curve: &Curve<D>, k: usize) -> Result<Curve<D>> {
    if k < 2 {
        return Err(Error::Domain(format!("resampling needs k >= 2, got {k}")));
    }
    let pts = &curve.points;
    let mut cumulative = Vec::with_capacity(pts.len());
    cumulative.push(0.0);
    for w in pts.windows(2) {
        let last = *cumulative.last().unwrap();
        cumulative.push(last + (w[1] - w[0]).norm());
    }
    let total = *cumulative.last().unwrap();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::DegenerateCurve);
    }

    let mut out = Vec::with_capacity(k);
    out.push(pts[0]);
    let mut seg = 0;
    for i in 1..k - 1 {
        let target = total * i as f64 / (k - 1) as f64;
        while seg + 2 < pts.len() && cumulative[seg + 1] < target {
            seg += 1;
        }
        let span = cumulative[seg + 1] - cumulative[seg];
        let alpha = if span > 0.0 {
            ((target - cumulative[seg]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(pts[seg] * (1.0 - alpha) + pts[seg + 1] * alpha);
    }
    out.push(pts[pts.len() - 1]);
    Ok(Curve { points: out })
}

/// Orthonormal basis `(e1, e2)` of the plane orthogonal to `axis`, with
/// `e1 x e2 = axis`. For the default +z axis this is (+x, +y).
pub fn frontal_basis(axis: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let hint = if axis.y.abs() > 0.9 {
        Vector3::new(0.0, 0.0, -1.0)
    } else {
        Vector3::new(0.0, 1.0, 0.0)
    };
    let e1 = hint.cross(axis).normalize();
    let e2 = axis.cross(&e1);
    (e1, e2)
}

/// Orthographic projection along `axis` into the plane's 2D basis.
pub fn project_frontal(curve: &Curve3, axis: &Vector3<f64>) -> Result<Curve2> {
    if !axis.iter().all(|c| c.is_finite()) || (axis.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::Domain(format!(
            "frontal axis must be a unit vector, |axis| = {}",
            axis.norm()
        )));
    }
    let (e1, e2) = frontal_basis(axis);
    curve.map(|p| Vector2::new(p.dot(&e1), p.dot(&e2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn curve3(points: &[[f64; 3]]) -> Curve3 {
        Curve::new(points.iter().map(|p| Vector3::from(*p)).collect()).unwrap()
    }

    #[test]
    fn extracts_in_loop_order() {
        let mesh = crate::mesh::tests::unit_triangle();
        let c = extract_loop_curve(&mesh, &[0, 1, 2]).unwrap();
        assert_eq!(c.points(), &mesh.vertices[..]);
        let r = extract_loop_curve(&mesh, &[2, 1, 0]).unwrap();
        assert_eq!(r, c.reversed());
    }

    #[test]
    fn extract_rejects_out_of_range() {
        let mesh = crate::mesh::tests::unit_triangle();
        let err = extract_loop_curve(&mesh, &[0, 3]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 3, len: 3 }));
    }

    #[test]
    fn segment_splits_uniformly() {
        let c = curve3(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let r = resample_by_arclength(&c, 5).unwrap();
        let xs: Vec<f64> = r.points().iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn l_shape_midpoint_is_corner() {
        let c: Curve2 = Curve::new(vec![
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(1.0, 1.0),
        ])
        .unwrap();
        let r = resample_by_arclength(&c, 3).unwrap();
        assert_abs_diff_eq!(r.points()[1], Vector2::new(1.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn zero_length_curve_is_degenerate() {
        let c = curve3(&[[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]]);
        assert!(matches!(resample_by_arclength(&c, 4), Err(Error::DegenerateCurve)));
    }

    #[test]
    fn k_below_two_is_domain_error() {
        let c = curve3(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        assert!(matches!(resample_by_arclength(&c, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn repeated_points_are_skipped() {
        let c = curve3(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        let r = resample_by_arclength(&c, 3).unwrap();
        assert_abs_diff_eq!(r.points()[1].x, 1.0, epsilon = 1e-15);
        assert_eq!(r.points()[2], Vector3::new(2.0, 0.0, 0.0));
    }

    #[test]
    fn z_axis_drops_depth() {
        let c = curve3(&[[1.0, 2.0, 3.0], [4.0, 5.0, -6.0]]);
        let p = project_frontal(&c, &Vector3::z()).unwrap();
        assert_eq!(p.points(), &[Vector2::new(1.0, 2.0), Vector2::new(4.0, 5.0)]);
        let shifted = curve3(&[[1.0, 2.0, 30.0], [4.0, 5.0, 7.0]]);
        assert_eq!(project_frontal(&shifted, &Vector3::z()).unwrap(), p);
    }

    #[test]
    fn x_axis_projection_matches_explicit_basis() {
        // Independent construction: Gram-Schmidt of the world y axis against
        // the view axis, completed by the right-hand rule.
        let axis = Vector3::new(1.0, 0.0, 0.0);
        let up = Vector3::new(0.0, 1.0, 0.0);
        let e2 = (up - axis * up.dot(&axis)).normalize();
        let e1 = e2.cross(&axis);
        let c = curve3(&[[7.0, 2.0, 3.0], [-1.0, -5.0, 0.5]]);
        let p = project_frontal(&c, &axis).unwrap();
        for (q, src) in p.points().iter().zip(c.points()) {
            assert_abs_diff_eq!(q.x, src.dot(&e1), epsilon = 1e-12);
            assert_abs_diff_eq!(q.y, src.dot(&e2), epsilon = 1e-12);
            // (y, z) up to sign convention
            assert_abs_diff_eq!(q.x.abs(), src.z.abs(), epsilon = 1e-12);
            assert_abs_diff_eq!(q.y.abs(), src.y.abs(), epsilon = 1e-12);
        }
    }

    #[test]
    fn non_unit_axis_is_rejected() {
        let c = curve3(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        assert!(project_frontal(&c, &Vector3::new(0.0, 0.0, 2.0)).is_err());
    }

    proptest! {
        #[test]
        fn basis_is_right_handed(a in prop::array::uniform3(-1.0f64..1.0)) {
            let axis = Vector3::from(a);
            prop_assume!(axis.norm() > 0.1);
            let axis = axis.normalize();
            let (e1, e2) = frontal_basis(&axis);
            prop_assert!((e1.norm() - 1.0).abs() < 1e-12);
            prop_assert!(e1.dot(&e2).abs() < 1e-12);
            prop_assert!((e1.cross(&e2) - axis).norm() < 1e-12);
        }

        #[test]
        fn collinear_polyline_resamples_to_equal_gaps(
            mut stops in prop::collection::vec(0.0f64..10.0, 0..10),
            k in 2usize..40,
        ) {
            stops.push(0.0);
            stops.push(10.0);
            stops.sort_by(f64::total_cmp);
            let dir = Vector2::new(0.6, 0.8);
            let c: Curve2 = Curve::new(stops.iter().map(|s| dir * *s).collect()).unwrap();
            let once = resample_by_arclength(&c, k).unwrap();
            let gap = 10.0 / (k - 1) as f64;
            for (i, p) in once.points().iter().enumerate() {
                prop_assert!((p - dir * (gap * i as f64)).norm() <= 1e-9);
            }
            let twice = resample_by_arclength(&once, k).unwrap();
            for (a, b) in once.points().iter().zip(twice.points()) {
                prop_assert!((a - b).norm() <= 1e-9);
            }
        }
    }
}
