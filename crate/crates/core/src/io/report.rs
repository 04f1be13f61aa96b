//! Deterministic JSON reports. Floats carry 17 significant digits, complex numbers are `[re, im]`,
//! rows are sorted by canonical class label.

use std::io::Write;

use num_complex::Complex64;
use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::heat::{heat_report, QuadratureSpec};
use crate::index::{convention_for, equivariant_lefschetz, finite_assembly, kawasaki_index, localized_index, sum_identity};
use crate::oracle::{sphere_equivariant_character, sphere_invariant_count, torus_invariant_index, torus_pullback_character, EigenCharacter};
use crate::rational::fmt_rat;
use crate::scalar::Scalar;
use crate::sector::{
    enumerate_sectors, ClassHandle, ClassKind, ComponentGeometry, CutoffKind, Element,
    FixedLocus, Geometry, Mode, OperatorKind, QuotientModel, SectionChoice,
};

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format!("{x}"));
    }
    Value::Number(serde_json::from_str::<Number>(&format!("{x:.16e}")).expect("formatted float is a JSON number"))
}

pub fn complex(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn scalar<S: Scalar>(v: &S) -> Value {
    complex(v.to_c64())
}

fn exact<S: Scalar>(v: &S) -> Value {
    v.exact_string().map(Value::String).unwrap_or(Value::Null)
}

fn value_fields<S: Scalar>(row: &mut Map<String, Value>, key: &str, v: &S) {
    row.insert(key.into(), scalar(v));
    if S::EXACT {
        row.insert(format!("{key}_exact"), exact(v));
    }
}

pub fn write_report(report: &Value, sink: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *sink, report).map_err(|e| Error::Io(e.to_string()))?;
    sink.write_all(b"\n").map_err(|e| Error::Io(e.to_string()))
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

pub fn convention_header(model: &QuotientModel) -> Value {
    let route = match convention_for(model) {
        crate::charclass::Convention::Todd => "todd: 1/det(1 - Φ⁻¹e^x) on T^{1,0}",
        crate::charclass::Convention::AHat => "a_hat: [det(1 - Φ⁻¹e^x)]^{1/2}, positive at x = 0",
    };
    let cutoff = match &model.options.cutoff {
        _ if model.is_finite() => "constant 1/|H|".to_string(),
        CutoffKind::Indicator { shift } => format!("indicator of [s, s+1)^2, s = ({}, {})", fmt_rat(&shift[0]), fmt_rat(&shift[1])),
        CutoffKind::Smooth => "smooth bump normalized over the group".into(),
    };
    json!({
        "lefschetz_term": "e^{2πiβ}/(1 - e^{2πiθ}), θ = turn of dg on T^{1,0}, Φ = dg⁻¹",
        "heat_supertrace": "Tr_s[h⁻¹ on Λ^{0,*}] = e^{2πiβ} - e^{2πi(β-θ)}",
        "restricted_cutoff": "c^(g)(y) = Σ_{k∈K} c(k·y)",
        "route": route,
        "cutoff": cutoff,
        "mode": mode_name(model.options.mode),
    })
}

fn header(model: &QuotientModel, command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(command.into()));
    m.insert("model".into(), Value::String(model.name.clone()));
    m.insert("convention".into(), convention_header(model));
    m
}

fn kind_name(k: ClassKind) -> &'static str {
    match k {
        ClassKind::FiniteClass => "finite",
        ClassKind::InfiniteClass => "infinite",
    }
}

pub fn fixed_set_summary(model: &QuotientModel, class: &ClassHandle) -> String {
    match model.fixed_points(&class.rep) {
        Ok(FixedLocus::Empty) => "empty".into(),
        Ok(FixedLocus::Full) => "full".into(),
        Ok(FixedLocus::Points(p)) => {
            let locs: Vec<String> = p.iter().map(|x| x.location.describe()).collect();
            format!("{} point{}: {}", p.len(), if p.len() == 1 { "" } else { "s" }, locs.join(", "))
        }
        Err(e) => format!("unsupported: {e}"),
    }
}

/// Classes with a nonempty fixed set, plus the identity; the rest are listed by label.
pub fn reported_classes(model: &QuotientModel) -> (Vec<ClassHandle>, Vec<String>) {
    let (mut kept, mut omitted) = (Vec::new(), Vec::new());
    for c in model.classes() {
        let free = matches!(model.fixed_points(&c.rep), Ok(FixedLocus::Empty));
        if free && c.label != "e" {
            omitted.push(c.label);
        } else {
            kept.push(c);
        }
    }
    (kept, omitted)
}

fn omitted_note(omitted: &[String]) -> Option<Value> {
    (!omitted.is_empty()).then(|| Value::String(format!("fixed-point-free classes omitted: {}", omitted.join(", "))))
}

fn class_row(model: &QuotientModel, class: &ClassHandle) -> Map<String, Value> {
    let mut row = Map::new();
    row.insert("label".into(), Value::String(class.label.clone()));
    row.insert("kind".into(), Value::String(kind_name(class.kind).into()));
    row.insert("fixed_set".into(), Value::String(fixed_set_summary(model, class)));
    let aliases: Vec<Value> =
        model.aliases.iter().filter(|(_, t)| **t == class.label).map(|(a, _)| Value::String(a.clone())).collect();
    if !aliases.is_empty() {
        row.insert("aliases".into(), Value::Array(aliases));
    }
    row
}

pub fn classes_report(model: &QuotientModel) -> Value {
    let mut out = header(model, "classes");
    let (classes, omitted) = reported_classes(model);
    let rows: Vec<Value> = classes
        .iter()
        .map(|c| {
            let mut row = class_row(model, c);
            row.insert("point_part".into(), Value::String(c.point_label.clone()));
            row.insert(
                "centralizer_order".into(),
                model.centralizer(&c.rep).map(|z| json!(z.len())).unwrap_or(Value::String("infinite".into())),
            );
            if let Some(ctr) = &c.center {
                row.insert("center".into(), json!([fmt_rat(&ctr[0]), fmt_rat(&ctr[1])]));
            }
            Value::Object(row)
        })
        .collect();
    out.insert("rows".into(), Value::Array(rows));
    let mut notes: Vec<Value> = omitted_note(&omitted).into_iter().collect();
    if !model.is_finite() {
        notes.push(Value::String("translation classes of the plane group are fixed-point free and omitted".into()));
    }
    if !notes.is_empty() {
        out.insert("notes".into(), Value::Array(notes));
    }
    Value::Object(out)
}

pub fn sectors_report(model: &QuotientModel) -> Result<Value> {
    let mut out = header(model, "sectors");
    let rows: Vec<Value> = enumerate_sectors(model)?
        .iter()
        .map(|s| {
            let mut row = Map::new();
            row.insert("label".into(), Value::String(s.class.label.clone()));
            match &s.geometry {
                ComponentGeometry::Isolated { point, orbit_size } => {
                    row.insert("component".into(), Value::String(format!("point {}", point.location.describe())));
                    row.insert("orbit_size".into(), json!(orbit_size));
                    row.insert("tangent_turn".into(), Value::String(fmt_rat(&point.tangent_turn)));
                }
                ComponentGeometry::Full { dimension, euler, twist, area } => {
                    row.insert("component".into(), Value::String(format!("full, dimension {dimension}")));
                    row.insert("euler".into(), json!(euler));
                    row.insert("twist".into(), json!(twist));
                    row.insert("area".into(), num(*area));
                }
            }
            row.insert("normal_turn".into(), s.normal_turn.map(|t| Value::String(fmt_rat(&t))).unwrap_or(Value::Null));
            row.insert("local_group_order".into(), json!(s.local_group_order));
            row.insert("fiber".into(), serde_json::to_value(&s.fiber).expect("fiber data serializes"));
            Value::Object(row)
        })
        .collect();
    out.insert("rows".into(), Value::Array(rows));
    Ok(Value::Object(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexMethod {
    Lefschetz,
    Kawasaki,
    Assembly,
}

/// `(report, pass)`.
pub fn index_report<S: Scalar>(model: &QuotientModel, method: IndexMethod) -> Result<(Value, bool)> {
    let tol = model.options.tolerance;
    let mut out = header(model, "index");
    match method {
        IndexMethod::Lefschetz => {
            let t = model.finite_table().ok_or_else(|| Error::Domain("Lefschetz numbers need a finite group".into()))?;
            let mut rows: Vec<(String, Value)> = Vec::new();
            for g in 0..t.order() {
                let v: S = equivariant_lefschetz(model, &Element::Finite(g))?;
                let mut row = Map::new();
                row.insert("element".into(), Value::String(t.name(g).to_string()));
                row.insert("class".into(), Value::String(model.class_of(&Element::Finite(g)).label));
                value_fields(&mut row, "lefschetz", &v);
                rows.push((t.name(g).to_string(), Value::Object(row)));
            }
            rows.sort_by(|a, b| a.0.cmp(&b.0));
            out.insert("method".into(), json!("lefschetz"));
            out.insert("rows".into(), Value::Array(rows.into_iter().map(|r| r.1).collect()));
            Ok((Value::Object(out), true))
        }
        IndexMethod::Kawasaki => {
            let k: S = kawasaki_index(model)?;
            let integral = near_integer(k.to_c64(), tol);
            let mut totals = Map::new();
            value_fields(&mut totals, "kawasaki", &k);
            out.insert("method".into(), json!("kawasaki"));
            out.insert("totals".into(), Value::Object(totals));
            out.insert("verdicts".into(), json!({ "integral": integral }));
            Ok((Value::Object(out), integral))
        }
        IndexMethod::Assembly => {
            let mut totals = Map::new();
            let mut residuals = Map::new();
            let k: S = kawasaki_index(model)?;
            value_fields(&mut totals, "kawasaki", &k);
            let pass = if model.is_finite() {
                let (a, b) = finite_assembly::<S>(model)?;
                value_fields(&mut totals, "by_element", &a);
                value_fields(&mut totals, "by_class", &b);
                let r1 = (a.to_c64() - b.to_c64()).norm();
                let r2 = (a.to_c64() - k.to_c64()).norm();
                residuals.insert("groupings".into(), num(r1));
                residuals.insert("assembly_vs_kawasaki".into(), num(r2));
                exact_or_close(&a, &b, tol) && exact_or_close(&a, &k, tol)
            } else {
                let r = sum_identity::<S>(model, &SectionChoice::Canonical)?;
                value_fields(&mut totals, "sum_of_localized", &r.assembly_total);
                let res = (r.assembly_total.to_c64() - k.to_c64()).norm();
                residuals.insert("sum_identity".into(), num(res));
                exact_or_close(&r.assembly_total, &k, tol)
            };
            out.insert("method".into(), json!("assembly"));
            out.insert("totals".into(), Value::Object(totals));
            out.insert("residuals".into(), Value::Object(residuals));
            out.insert("verdicts".into(), json!({ "assembly_equalities": pass }));
            Ok((Value::Object(out), pass))
        }
    }
}

fn near_integer(z: Complex64, tol: f64) -> bool {
    z.im.abs() < tol && (z.re - z.re.round()).abs() < tol
}

/// Exact equality for exact fields, `|a − b| < tol` otherwise.
fn exact_or_close<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    if S::EXACT {
        a == b
    } else {
        (a.to_c64() - b.to_c64()).norm() < tol
    }
}

pub fn localized_report<S: Scalar>(model: &QuotientModel, label: &str, section: &SectionChoice) -> Result<Value> {
    let class = model.resolve(label)?;
    let v: S = localized_index(model, &class, section)?;
    let mut out = header(model, "localized");
    let mut row = class_row(model, &class);
    value_fields(&mut row, "localized_index", &v);
    out.insert("section".into(), Value::String(format!("{section:?}").to_lowercase()));
    out.insert("rows".into(), json!([Value::Object(row)]));
    Ok(Value::Object(out))
}

pub fn heat_report_doc(model: &QuotientModel, label: &str, ts: &[f64], quad: &QuadratureSpec) -> Result<(Value, bool)> {
    let class = model.resolve(label)?;
    let r = heat_report(model, &class, ts, quad)?;
    let mut out = header(model, "heat");
    let rows: Vec<Value> = r
        .samples
        .iter()
        .zip(&r.orbital)
        .map(|(s, o)| {
            json!({
                "t": num(s.t),
                "heat_trace": complex(s.value),
                "orbital_integral": o.map(complex).unwrap_or(Value::Null),
                "kernel_mass": num(s.kernel_mass),
                "truncation_bound": num(s.truncation_bound),
                "truncation_radius": s.truncation_radius,
                "class_members": s.members,
                "grid": s.grid,
                "quadrature_estimate": num(s.quadrature_estimate),
            })
        })
        .collect();
    let pass = r.passes();
    out.insert("class".into(), Value::String(class.label.clone()));
    out.insert("cutoff_kind".into(), Value::String(r.cutoff.into()));
    out.insert("rows".into(), Value::Array(rows));
    out.insert("localized_index".into(), complex(r.localized_index));
    out.insert(
        "residuals".into(),
        json!({
            "max_t_variation": num(r.max_t_variation),
            "mckean_singer": num(r.mckean_singer_residual),
            "orbital": r.orbital_residual.map(num).unwrap_or(Value::Null),
        }),
    );
    out.insert("tolerance".into(), num(r.tolerance));
    out.insert("verdicts".into(), json!({ "pass": pass }));
    Ok((Value::Object(out), pass))
}

fn oracle_to<S: Scalar>(ch: &EigenCharacter) -> S {
    ch.multiplicities().iter().fold(S::zero(), |acc, (t, m)| acc + S::root_of_unity(*t) * S::from_int(*m))
}

/// Sum identity, assembly groupings, integrality, paired reality and every applicable oracle.
pub fn verify_report<S: Scalar>(model: &QuotientModel) -> Result<(Value, bool)> {
    let tol = model.options.tolerance;
    let report = sum_identity::<S>(model, &SectionChoice::Canonical)?;
    let mut out = header(model, "verify");
    let mut pass = report.passes(tol);
    let mut notes: Vec<Value> = report.notes.iter().map(|n| Value::String(n.clone())).collect();
    let mut residuals: Map<String, Value> = report.residuals.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
    if S::EXACT {
        let exact_ok = report.assembly_total == report.kawasaki_total
            && report.finite_assembly.as_ref().is_none_or(|(a, b)| a == b && *a == report.kawasaki_total);
        pass &= exact_ok;
    }

    let (shown, omitted) = reported_classes(model);
    notes.extend(omitted_note(&omitted));
    let rows: Vec<Value> = shown
        .iter()
        .map(|c| {
            let mut row = class_row(model, c);
            value_fields(&mut row, "localized_index", &report.per_class[&c.label]);
            Value::Object(row)
        })
        .collect();

    let mut oracle = Map::new();
    match &model.geometry {
        Geometry::Torus { elements, .. } => {
            let t = model.finite_table().expect("finite");
            let mut worst: f64 = 0.0;
            let mut exact_ok = true;
            for g in 0..t.order() {
                let e = Element::Finite(g);
                let engine: S = equivariant_lefschetz(model, &e)?;
                let o: S = oracle_to(&torus_pullback_character(&elements[g], model.fiber_character(&e))?.character);
                worst = worst.max((engine.to_c64() - o.to_c64()).norm());
                exact_ok &= !S::EXACT || engine == o;
            }
            residuals.insert("lefschetz_vs_oracle".into(), num(worst));
            pass &= worst < tol && exact_ok;
            match torus_invariant_index(model) {
                Ok(n) => {
                    let r = (report.kawasaki_total.to_c64() - Complex64::new(n as f64, 0.0)).norm();
                    oracle.insert("invariant_index".into(), json!(n));
                    residuals.insert("kawasaki_vs_oracle".into(), num(r));
                    pass &= r < tol && (!S::EXACT || report.kawasaki_total == S::from_int(n));
                }
                Err(e) => notes.push(Value::String(format!("invariant-index oracle not applicable: {e}"))),
            }
        }
        Geometry::Sphere { table, .. } => {
            let n = table.order();
            let k = model.bundle.twist_degree;
            match sphere_invariant_count(k, n) {
                Ok(count) => {
                    let mut worst: f64 = 0.0;
                    let mut exact_ok = true;
                    for j in 0..n {
                        let engine: S = equivariant_lefschetz(model, &Element::Finite(j))?;
                        let o: S = oracle_to(&sphere_equivariant_character(k, n, j)?.character);
                        worst = worst.max((engine.to_c64() - o.to_c64()).norm());
                        exact_ok &= !S::EXACT || engine == o;
                    }
                    let r = (report.kawasaki_total.to_c64() - Complex64::new(count as f64, 0.0)).norm();
                    oracle.insert("monomial_count".into(), json!(count));
                    residuals.insert("lefschetz_vs_oracle".into(), num(worst));
                    residuals.insert("kawasaki_vs_oracle".into(), num(r));
                    pass &= worst < tol && r < tol && exact_ok && (!S::EXACT || report.kawasaki_total == S::from_int(count));
                }
                Err(e) => notes.push(Value::String(format!("monomial oracle not applicable: {e}"))),
            }
        }
        Geometry::Plane { .. } => {
            // section independence on a scrambled section
            let mut worst: f64 = 0.0;
            for c in &model.classes() {
                let v: S = localized_index(model, c, &SectionChoice::Scrambled(0x5eed))?;
                worst = worst.max((v.to_c64() - report.per_class[&c.label].to_c64()).norm());
            }
            residuals.insert("section_independence".into(), num(worst));
            pass &= worst < tol;
        }
    }

    let mut totals = Map::new();
    value_fields(&mut totals, "sum_of_localized", &report.assembly_total);
    value_fields(&mut totals, "kawasaki", &report.kawasaki_total);
    if let Some((a, b)) = &report.finite_assembly {
        value_fields(&mut totals, "assembly_by_element", a);
        value_fields(&mut totals, "assembly_by_class", b);
    }
    out.insert("rows".into(), Value::Array(rows));
    out.insert("totals".into(), Value::Object(totals));
    out.insert("residuals".into(), Value::Object(residuals));
    if !oracle.is_empty() {
        out.insert("oracle".into(), Value::Object(oracle));
    }
    out.insert(
        "verdicts".into(),
        json!({
            "integral": report.integrality_verdict,
            "paired_reality": report.paired_reality,
            "psc_obstruction": report.psc_obstruction,
            "pass": pass,
        }),
    );
    if model.bundle.operator == OperatorKind::Dolbeault || !notes.is_empty() {
        out.insert("notes".into(), Value::Array(notes));
    }
    Ok((Value::Object(out), pass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::Cyclotomic;
    use crate::sector::tests::{e_z4, p4, sphere};

    fn render(v: &Value) -> String {
        let mut buf = Vec::new();
        write_report(v, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(num(0.25).to_string(), "2.5000000000000000e-1");
        assert_eq!(complex(Complex64::new(1.0, -0.5)).to_string(), "[1.0000000000000000e+0,-5.0000000000000000e-1]");
    }

    #[test]
    fn verify_passes_on_examples() {
        for m in [e_z4(), sphere(3, 7), p4(Default::default())] {
            let (r, pass) = verify_report::<Cyclotomic>(&m).unwrap();
            assert!(pass, "{}", render(&r));
            let (_, pass) = verify_report::<Complex64>(&m).unwrap();
            assert!(pass);
        }
    }

    #[test]
    fn localized_value_and_exact_string() {
        let r = localized_report::<Cyclotomic>(&p4(Default::default()), "r2_edge", &SectionChoice::Canonical).unwrap();
        let row = &r["rows"][0];
        assert_eq!(row["localized_index"], complex(Complex64::new(0.25, 0.0)));
        assert_eq!(row["localized_index_exact"], json!("1/4"));
    }

    #[test]
    fn reports_are_deterministic() {
        let m = p4(Default::default());
        let a = render(&verify_report::<Cyclotomic>(&m).unwrap().0);
        let b = render(&verify_report::<Cyclotomic>(&m).unwrap().0);
        assert_eq!(a, b);
        assert!(a.contains("\"convention\""));
    }

    #[test]
    fn lefschetz_rows_are_sorted() {
        let (r, _) = index_report::<Cyclotomic>(&e_z4(), IndexMethod::Lefschetz).unwrap();
        let names: Vec<&str> = r["rows"].as_array().unwrap().iter().map(|x| x["element"].as_str().unwrap()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(names.len(), 4);
    }

    #[test]
    fn free_action_reports_identity_only() {
        let doc = crate::io::model_doc::parse_document(
            r#"{"schema_version": 1, "name": "free",
                "ambient": {"kind": "torus", "gram": [["1","0"],["0","1"]]},
                "group": {"kind": "affine", "generators": [{"matrix": [[1,0],[0,1]], "translation": ["1/2","0"]}]},
                "bundle": {"operator": "dolbeault", "character": ["1/2"]}}"#,
        )
        .unwrap();
        let m = crate::io::model_doc::build_model(&doc, None).unwrap();
        let (r, pass) = verify_report::<Cyclotomic>(&m).unwrap();
        assert!(pass, "{}", render(&r));
        let labels: Vec<&str> = r["rows"].as_array().unwrap().iter().map(|x| x["label"].as_str().unwrap()).collect();
        assert_eq!(labels, vec!["e"]);
    }
}
