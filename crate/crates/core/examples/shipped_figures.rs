//! Writes the example figure documents into the directory given as the
//! first argument (default `figures`).

use std::path::PathBuf;

use cycles::figure::{midpoint_constructor, Assertion, Expectation, RelationDecl, Value};
use cycles::{CheckKind, Cycle, Figure, MeasureKind, Metric, RelationSpec, Result, Scalar};

fn o(k: &str) -> RelationSpec {
    RelationSpec::orthogonal(k)
}

fn hello_cycle() -> Result<Figure> {
    let mut f = Figure::new(Metric::elliptic(2), None)?;
    f.add_point(&[-1.0, 0.5], "A")?;
    f.add_point(&[1.0, 1.5], "B")?;
    f.add_cycle_rel([o("A"), o("B"), o("R")], "a")?;
    Ok(f)
}

fn lobachevsky_anim() -> Result<Figure> {
    let mut f = Figure::new(Metric::elliptic(2), None)?;
    f.set_parameter("t", 2.0 / 30.0);
    f.add_point_expr(vec![Value::param("t", -1.0, 0.0), Value::param("t", 0.5, 0.5)], "A")?;
    f.add_point(&[1.0, 1.5], "B")?;
    f.add_cycle_rel([o("A"), o("B"), o("R")], "a")?;
    f.add_cycle_rel([o("A"), o("B"), o("infty")], "b")?;
    f.set_style("b", "dashed")?;
    Ok(f)
}

fn modular_group() -> Result<Figure> {
    let e = Metric::elliptic(2);
    let mut f = Figure::new(e.clone(), None)?;
    f.freeze();
    f.add_cycle(Cycle::from_center_radius_sq(&[0.0, 1.5], 0.25, &e)?, "a")?;
    f.add_cycle(Cycle::from_center_radius_sq(&[0.0, 11.0 / 6.0], 1.0 / 36.0, &e)?, "c")?;
    let (one, zero) = (Scalar::new(1.0, 0.0), Scalar::new(0.0, 0.0));
    for i in 0..3 {
        let shade = 1.0 - 0.3 * i as f64;
        for k in f.get_all_keys(2 * i, 2 * i) {
            for t in -3..=3 {
                if t == 0 && i != 0 {
                    continue;
                }
                let shift = [
                    vec![one, zero, zero, zero],
                    vec![zero, Scalar::new(t as f64, 0.0), zero, zero],
                    vec![zero; 4],
                    vec![one, zero, zero, zero],
                ];
                let key = format!("{k}{t:+}");
                f.add_cycle_rel([RelationSpec::moebius(&k, shift)], &key)?;
                f.set_style(&key, format!("rgb(0,0,{shade:.1})"))?;
            }
        }
        for k in f.get_all_keys(2 * i + 1, 2 * i + 1) {
            let key = format!("{k}s");
            f.add_cycle_rel([RelationSpec::sl2(&k, 0.0, -1.0, 1.0, 0.0)], &key)?;
            f.set_style(&key, format!("rgb(0,{shade:.1},0)"))?;
        }
    }
    f.unfreeze();
    Ok(f)
}

fn nine_points(metric: Metric) -> Result<Figure> {
    let mut f = Figure::new(metric, None)?;
    f.add_point(&[-1.0, 0.0], "A")?;
    f.add_point(&[1.0, 0.0], "B")?;
    f.add_point(&[-0.2, -1.5], "C")?;
    f.add_cycle(Cycle::from_real(0.0, &[0.0, 0.0], 1.0), "N")?;
    f.add_cycle_rel([o("B"), o("C"), o("N")], "a")?;
    f.add_cycle_rel([o("A"), o("C"), o("N")], "b")?;
    f.add_cycle_rel([o("A"), o("B"), o("N")], "c")?;
    f.add_cycle_rel([o("A"), o("N"), o("a")], "h_a")?;
    f.add_cycle_rel([o("B"), o("N"), o("b")], "h_b")?;
    f.add_cycle_rel([o("C"), o("N"), o("c")], "h_c")?;
    let adiff = RelationSpec::adifferent("N");
    f.add_cycle_rel([o("a"), o("h_a"), o("A_h"), adiff.clone()], "A_h")?;
    f.add_cycle_rel([o("b"), o("h_b"), o("B_h"), adiff.clone()], "B_h")?;
    f.add_cycle_rel([o("c"), o("h_c"), o("C_h"), adiff.clone()], "C_h")?;
    f.add_cycle_rel([o("A_h"), o("B_h"), o("C_h")], "p")?;
    let mid = midpoint_constructor();
    f.add_subfigure(mid.clone(), &["B", "C", "N"], "A_m")?;
    f.add_subfigure(mid.clone(), &["C", "A", "N"], "B_m")?;
    f.add_subfigure(mid.clone(), &["A", "B", "N"], "C_m")?;
    f.add_cycle_rel([o("h_a"), o("h_b"), o("O"), adiff], "O")?;
    f.add_subfigure(mid.clone(), &["O", "A", "N"], "A_d")?;
    f.add_subfigure(mid.clone(), &["B", "O", "N"], "B_d")?;
    f.add_subfigure(mid, &["C", "O", "N"], "C_d")?;
    let (ti, to, real) = (RelationSpec::tangent_i, RelationSpec::tangent_o, RelationSpec::real_cycle);
    f.add_cycle_rel([to("a"), ti("b"), ti("c"), real("v_a")], "v_a")?;
    f.add_cycle_rel([ti("a"), to("b"), ti("c"), real("v_b")], "v_b")?;
    f.add_cycle_rel([ti("a"), ti("b"), to("c"), real("v_c")], "v_c")?;
    f.set_style("p", "rgb(0.8,0,0),1.5")?;
    for k in ["A_h", "B_h", "C_h", "A_m", "B_m", "C_m", "A_d", "B_d", "C_d"] {
        f.add_assertion(Assertion::check(CheckKind::Orthogonal, "p", k));
    }
    for k in ["v_a", "v_b", "v_c"] {
        f.add_assertion(Assertion::check(CheckKind::Tangent, "p", k));
    }
    Ok(f)
}

fn fillmore_springer() -> Result<Figure> {
    let e = Metric::elliptic(2);
    let mut f = Figure::new(e.clone(), None)?;
    f.add_cycle(Cycle::from_center_radius_sq(&[7.0, 1.0], 4.0, &e)?, "A")?;
    f.add_cycle(Cycle::from_center_radius_sq(&[5.0, 3.0], 25.0, &e)?, "B")?;
    f.add_cycle(Cycle::from_real(0.0, &[5.0 / 13.0, 12.0 / 13.0], 0.0), "C")?;
    f.add_cycle_rel(
        [
            RelationSpec::tangential_distance("A", 7.0),
            RelationSpec::angle("B", 0.8),
            o("C"),
            RelationSpec::real_cycle("D"),
        ],
        "D",
    )?;
    f.add_assertion(Assertion::measure(
        MeasureKind::SqCrossTDistance,
        "D",
        "A",
        Expectation::All(vec![41.0, -53.0 / 7.0]),
    ));
    Ok(f)
}

fn apollonius3d() -> Result<Figure> {
    let e = Metric::elliptic(3);
    let mut f = Figure::new(e.clone(), None)?;
    let r2 = 0.75;
    let centres = [[1.0, 1.0, 1.0], [-1.0, -1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0]];
    let spheres = ["a", "b", "c", "d"];
    for (c, k) in centres.iter().zip(spheres) {
        f.add_cycle(Cycle::from_center_radius_sq(c, r2, &e)?, k)?;
    }
    let mut rels: Vec<RelationDecl> = spheres.iter().map(|k| RelationSpec::tangent(*k).into()).collect();
    rels.push(RelationSpec::only_reals("N").into());
    rels.push(RelationSpec::real_cycle("N").into());
    f.add_cycle_rel(rels, "N")?;
    for k in spheres {
        f.add_assertion(Assertion::check(CheckKind::Tangent, "N", k));
    }
    Ok(f)
}

fn main() -> Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir)?;
    let mut hyperbolic = nine_points(Metric::elliptic(2))?;
    hyperbolic.set_metric(Metric::hyperbolic(), None)?;
    let docs = [
        ("hello_cycle", hello_cycle()?),
        ("lobachevsky_anim", lobachevsky_anim()?),
        ("modular_group", modular_group()?),
        ("nine_points", nine_points(Metric::elliptic(2))?),
        ("nine_points_hyperbolic", hyperbolic),
        ("fillmore_springer", fillmore_springer()?),
        ("apollonius3d", apollonius3d()?),
    ];
    for (name, f) in docs {
        f.save(dir.join(format!("{name}.json")))?;
    }
    Ok(())
}
