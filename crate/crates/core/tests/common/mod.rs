#![allow(dead_code)]

pub mod oracle;

use cycles::figure::midpoint_constructor;
use cycles::{CheckKind, Cycle, Figure, Metric, RelationSpec};

pub const FEET: [&str; 3] = ["A_h", "B_h", "C_h"];
pub const MIDPOINTS: [&str; 6] = ["A_m", "B_m", "C_m", "A_d", "B_d", "C_d"];
pub const EXCIRCLES: [&str; 3] = ["v_a", "v_b", "v_c"];

/// Triangle, altitudes, feet, midpoints, the nine-point cycle `p` and the
/// three cycles touching all sides, with `N` standing in for infinity.
pub fn nine_points(metric: Metric, vertices: [[f64; 2]; 3], n: Option<[f64; 2]>) -> Figure {
    let mut f = Figure::new(metric, None).unwrap();
    let o = |k: &str| RelationSpec::orthogonal(k);
    f.add_point(&vertices[0], "A").unwrap();
    f.add_point(&vertices[1], "B").unwrap();
    f.add_point(&vertices[2], "C").unwrap();
    f.add_cycle(Cycle::from_real(0.0, &[0.0, 0.0], 1.0), "N").unwrap();
    if let Some(n) = n {
        f.move_point("N", &n).unwrap();
    }
    f.add_cycle_rel([o("B"), o("C"), o("N")], "a").unwrap();
    f.add_cycle_rel([o("A"), o("C"), o("N")], "b").unwrap();
    f.add_cycle_rel([o("A"), o("B"), o("N")], "c").unwrap();
    f.add_cycle_rel([o("A"), o("N"), o("a")], "h_a").unwrap();
    f.add_cycle_rel([o("B"), o("N"), o("b")], "h_b").unwrap();
    f.add_cycle_rel([o("C"), o("N"), o("c")], "h_c").unwrap();
    let adiff = RelationSpec::adifferent("N");
    f.add_cycle_rel([o("a"), o("h_a"), o("A_h"), adiff.clone()], "A_h").unwrap();
    f.add_cycle_rel([o("b"), o("h_b"), adiff.clone(), o("B_h")], "B_h").unwrap();
    f.add_cycle_rel([adiff.clone(), o("c"), o("h_c"), o("C_h")], "C_h").unwrap();
    f.add_cycle_rel([o("A_h"), o("B_h"), o("C_h")], "p").unwrap();
    let sf = midpoint_constructor();
    f.add_subfigure(sf.clone(), &["B", "C", "N"], "A_m").unwrap();
    f.add_subfigure(sf.clone(), &["C", "A", "N"], "B_m").unwrap();
    f.add_subfigure(sf.clone(), &["A", "B", "N"], "C_m").unwrap();
    f.add_cycle_rel([o("h_a"), o("h_b"), o("O"), adiff], "O").unwrap();
    f.add_subfigure(sf.clone(), &["O", "A", "N"], "A_d").unwrap();
    f.add_subfigure(sf.clone(), &["B", "O", "N"], "B_d").unwrap();
    f.add_subfigure(sf, &["C", "O", "N"], "C_d").unwrap();
    let (ti, to) = (RelationSpec::tangent_i, RelationSpec::tangent_o);
    let real = RelationSpec::real_cycle;
    f.add_cycle_rel([to("a"), ti("b"), ti("c"), real("v_a")], "v_a").unwrap();
    f.add_cycle_rel([ti("a"), to("b"), ti("c"), real("v_b")], "v_b").unwrap();
    f.add_cycle_rel([ti("a"), ti("b"), to("c"), real("v_c")], "v_c").unwrap();
    f
}

/// Largest residual of the nine incidences (feet and midpoints), and of the
/// three tangencies.
pub fn nine_point_residuals(f: &Figure) -> (f64, f64) {
    let worst = |keys: &[&str], kind| {
        keys.iter()
            .map(|k| {
                let r = f.check_rel("p", k, kind, true).unwrap();
                if r.is_empty() {
                    f64::INFINITY
                } else {
                    r.iter().map(|x| x.norm()).fold(0.0, f64::max)
                }
            })
            .fold(0.0, f64::max)
    };
    let incidences = worst(&FEET, CheckKind::Orthogonal).max(worst(&MIDPOINTS, CheckKind::Orthogonal));
    (incidences, worst(&EXCIRCLES, CheckKind::Tangent))
}

pub const TRIANGLE: [[f64; 2]; 3] = [[-1.0, 0.0], [1.0, 0.0], [-0.2, -1.5]];
