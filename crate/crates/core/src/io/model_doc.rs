//! JSON model documents. Rationals are strings `"p/q"`; unknown fields are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::lattice::RMat2;
use crate::group::{AffineIsometry, CrystGroup};
use crate::rational::{fmt_rat, parse_rat, Rat};
use crate::sector::{BundleSpec, CutoffKind, Geometry, Mode, ModelOptions, OperatorKind, QuotientModel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub schema_version: u32,
    pub name: String,
    pub ambient: AmbientDoc,
    pub group: GroupDoc,
    pub bundle: BundleDoc,
    #[serde(default)]
    pub options: OptionsDoc,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aliases: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AmbientDoc {
    /// Euclidean plane; `gram` is the metric on lattice coordinates.
    Plane { gram: [[String; 2]; 2] },
    Torus { gram: [[String; 2]; 2] },
    Sphere { radius: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupDoc {
    Affine { generators: Vec<GeneratorDoc> },
    /// Rotations about the polar axis by multiples of `1/order` turn.
    SphereRotations { order: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub matrix: [[i64; 2]; 2],
    pub translation: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDoc {
    pub operator: OperatorKind,
    #[serde(default)]
    pub twist_degree: i64,
    /// flat character: turn per generator
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDoc {
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub cutoff: CutoffDoc,
}

fn default_mode() -> Mode {
    Mode::Exact
}

fn default_tolerance() -> f64 {
    1e-10
}

impl Default for OptionsDoc {
    fn default() -> Self {
        OptionsDoc { mode: default_mode(), tolerance: default_tolerance(), cutoff: CutoffDoc::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CutoffDoc {
    Indicator {
        #[serde(default = "zero_shift")]
        shift: [String; 2],
    },
    Smooth,
}

fn zero_shift() -> [String; 2] {
    ["0".into(), "0".into()]
}

impl Default for CutoffDoc {
    fn default() -> Self {
        CutoffDoc::Indicator { shift: zero_shift() }
    }
}

pub fn parse_document(text: &str) -> Result<ModelDocument> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

/// Reads, validates and builds a model; `mode` overrides the document's arithmetic mode.
pub fn load_model(path: &Path, mode: Option<Mode>) -> Result<QuotientModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let doc = parse_document(&text)?;
    build_model(&doc, mode)
}

/// `ORBINDEX_MODE=exact|float`.
pub fn mode_from_env() -> Result<Option<Mode>> {
    match std::env::var("ORBINDEX_MODE") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim() {
            "exact" => Ok(Some(Mode::Exact)),
            "float" => Ok(Some(Mode::Float)),
            other => Err(Error::Parse(format!("ORBINDEX_MODE must be `exact` or `float`, got {other:?}"))),
        },
    }
}

struct Violations(Vec<String>);

impl Violations {
    fn rat(&mut self, field: &str, s: &str) -> Rat {
        parse_rat(s).unwrap_or_else(|_| {
            self.0.push(format!("{field}: {s:?} is not an exact rational p/q"));
            Rat::from_integer(0)
        })
    }

    fn gram(&mut self, field: &str, g: &[[String; 2]; 2]) -> RMat2 {
        let mut m = [[Rat::from_integer(0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = self.rat(&format!("{field}[{i}][{j}]"), &g[i][j]);
            }
        }
        m
    }
}

pub fn build_model(doc: &ModelDocument, mode: Option<Mode>) -> Result<QuotientModel> {
    let mut v = Violations(Vec::new());
    if doc.schema_version != SCHEMA_VERSION {
        v.0.push(format!("schema_version: expected {SCHEMA_VERSION}, got {}", doc.schema_version));
    }
    if !(doc.options.tolerance.is_finite() && doc.options.tolerance > 0.0) {
        v.0.push("options.tolerance: must be a positive number".into());
    }
    let generators: Vec<AffineIsometry> = match &doc.group {
        GroupDoc::Affine { generators } => generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let t = [
                    v.rat(&format!("group.generators[{i}].translation[0]"), &g.translation[0]),
                    v.rat(&format!("group.generators[{i}].translation[1]"), &g.translation[1]),
                ];
                AffineIsometry::new(g.matrix, t)
            })
            .collect(),
        GroupDoc::SphereRotations { .. } => Vec::new(),
    };
    let character = doc.bundle.character.as_ref().map(|c| {
        c.iter().enumerate().map(|(i, s)| v.rat(&format!("bundle.character[{i}]"), s)).collect::<Vec<Rat>>()
    });
    let cutoff = match &doc.options.cutoff {
        CutoffDoc::Indicator { shift } => CutoffKind::Indicator {
            shift: [v.rat("options.cutoff.shift[0]", &shift[0]), v.rat("options.cutoff.shift[1]", &shift[1])],
        },
        CutoffDoc::Smooth => CutoffKind::Smooth,
    };
    let geometry_input = match (&doc.ambient, &doc.group) {
        (AmbientDoc::Plane { gram }, GroupDoc::Affine { .. }) => Some((0, v.gram("ambient.gram", gram), Rat::from_integer(0), 0)),
        (AmbientDoc::Torus { gram }, GroupDoc::Affine { .. }) => Some((1, v.gram("ambient.gram", gram), Rat::from_integer(0), 0)),
        (AmbientDoc::Sphere { radius }, GroupDoc::SphereRotations { order }) => {
            Some((2, [[Rat::from_integer(0); 2]; 2], v.rat("ambient.radius", radius), *order))
        }
        _ => {
            v.0.push("group.kind: plane and torus take `affine` groups, the sphere takes `sphere_rotations`".into());
            None
        }
    };
    if !v.0.is_empty() {
        return Err(Error::Schema(v.0));
    }
    let (kind, gram, radius, order) = geometry_input.expect("checked");
    let geometry = match kind {
        0 => Geometry::Plane { group: CrystGroup::new(gram, generators)? },
        1 => QuotientModel::torus(gram, generators)?,
        _ => QuotientModel::sphere(radius, order)?,
    };
    let options = ModelOptions { mode: mode.unwrap_or(doc.options.mode), tolerance: doc.options.tolerance, cutoff };
    let bundle = BundleSpec { operator: doc.bundle.operator, twist_degree: doc.bundle.twist_degree, character };
    QuotientModel::new(doc.name.clone(), geometry, bundle, options, doc.aliases.clone())
}

fn gram_doc(g: &RMat2) -> [[String; 2]; 2] {
    [[fmt_rat(&g[0][0]), fmt_rat(&g[0][1])], [fmt_rat(&g[1][0]), fmt_rat(&g[1][1])]]
}

fn generator_doc(g: &AffineIsometry) -> GeneratorDoc {
    let t = g.translation();
    GeneratorDoc { matrix: *g.point_part(), translation: [fmt_rat(&t[0]), fmt_rat(&t[1])] }
}

/// Document of a built model, with generators in normal form.
pub fn to_document(model: &QuotientModel) -> ModelDocument {
    let (ambient, group) = match &model.geometry {
        Geometry::Plane { group } => (
            AmbientDoc::Plane { gram: gram_doc(group.gram()) },
            GroupDoc::Affine { generators: group.generators().iter().map(generator_doc).collect() },
        ),
        Geometry::Torus { gram, generators, .. } => (
            AmbientDoc::Torus { gram: gram_doc(gram) },
            GroupDoc::Affine { generators: generators.iter().map(generator_doc).collect() },
        ),
        Geometry::Sphere { radius, table } => {
            (AmbientDoc::Sphere { radius: fmt_rat(radius) }, GroupDoc::SphereRotations { order: table.order() })
        }
    };
    let cutoff = match &model.options.cutoff {
        CutoffKind::Indicator { shift } => CutoffDoc::Indicator { shift: [fmt_rat(&shift[0]), fmt_rat(&shift[1])] },
        CutoffKind::Smooth => CutoffDoc::Smooth,
    };
    ModelDocument {
        schema_version: SCHEMA_VERSION,
        name: model.name.clone(),
        ambient,
        group,
        bundle: BundleDoc {
            operator: model.bundle.operator,
            twist_degree: model.bundle.twist_degree,
            character: model.bundle.character.as_ref().map(|c| c.iter().map(fmt_rat).collect()),
        },
        options: OptionsDoc { mode: model.options.mode, tolerance: model.options.tolerance, cutoff },
        aliases: model.aliases.clone(),
    }
}

pub fn write_document(doc: &ModelDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const E_Z4: &str = r#"{
      "schema_version": 1,
      "name": "e_z4",
      "ambient": {"kind": "torus", "gram": [["1","0"],["0","1"]]},
      "group": {"kind": "affine", "generators": [{"matrix": [[0,-1],[1,0]], "translation": ["0","0"]}]},
      "bundle": {"operator": "dolbeault"}
    }"#;

    #[test]
    fn loads_and_round_trips() {
        let m = build_model(&parse_document(E_Z4).unwrap(), None).unwrap();
        assert_eq!(m.group_order(), Some(4));
        let doc = to_document(&m);
        let again = build_model(&parse_document(&write_document(&doc)).unwrap(), None).unwrap();
        assert_eq!(to_document(&again), doc);
    }

    #[test]
    fn unknown_fields_are_rejected_with_position() {
        let bad = E_Z4.replace("\"name\"", "\"nmae\"");
        match parse_document(&bad) {
            Err(Error::Parse(msg)) => assert!(msg.contains("line") && msg.contains("nmae"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let extra = E_Z4.replace("\"operator\": \"dolbeault\"", "\"operator\": \"dolbeault\", \"rank\": 2");
        assert!(matches!(parse_document(&extra), Err(Error::Parse(_))));
    }

    #[test]
    fn schema_violations_are_listed() {
        let bad = E_Z4.replace("\"schema_version\": 1", "\"schema_version\": 9").replace("[\"0\",\"0\"]", "[\"1/0\",\"x\"]");
        match build_model(&parse_document(&bad).unwrap(), None) {
            Err(Error::Schema(v)) => assert_eq!(v.len(), 3, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_crystallographic_generator_is_rejected() {
        let shear = E_Z4.replace("[[0,-1],[1,0]]", "[[1,1],[0,1]]");
        assert!(build_model(&parse_document(&shear).unwrap(), None).is_err());
    }

    #[test]
    fn translations_are_normalized() {
        let third = E_Z4.replace("[\"0\",\"0\"]", "[\"4/3\",\"-2\"]");
        let m = build_model(&parse_document(&third).unwrap(), None).unwrap();
        match to_document(&m).group {
            GroupDoc::Affine { generators } => assert_eq!(generators[0].translation, ["1/3".to_string(), "0".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mode_override() {
        let m = build_model(&parse_document(E_Z4).unwrap(), Some(Mode::Float)).unwrap();
        assert_eq!(m.options.mode, Mode::Float);
    }
}
