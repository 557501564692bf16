//! Templates shipped with the library.

use crate::model::{BoundTemplate, Params, Template};

const SOURCES: &[(&str, &str)] = &[
    ("schur", include_str!("../templates/schur.tmpl")),
    ("schur-product", include_str!("../templates/schur-product.tmpl")),
    ("xyxy", include_str!("../templates/xyxy.tmpl")),
    ("xyxy-distinct", include_str!("../templates/xyxy-distinct.tmpl")),
    ("xyxy-values", include_str!("../templates/xyxy-values.tmpl")),
    ("xny", include_str!("../templates/xny.tmpl")),
    ("tower2", include_str!("../templates/tower2.tmpl")),
    ("tower3", include_str!("../templates/tower3.tmpl")),
    ("partial-products-2-1", include_str!("../templates/partial-products-2-1.tmpl")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".tmpl").unwrap_or(name);
    SOURCES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// A bundled template by name (a trailing `.tmpl` is ignored).
pub fn template(name: &str) -> Option<Template> {
    source(name).map(|s| Template::parse(s).expect("bundled templates parse"))
}

/// A bundled template with its parameters bound.
pub fn bound(name: &str, params: &Params) -> Option<BoundTemplate> {
    template(name).map(|t| BoundTemplate::new(t, params).expect("bundled parameters"))
}

/// The configurations used by the cross-checking suites, each with its
/// parameters bound.
pub fn suite() -> Vec<BoundTemplate> {
    let mut out = Vec::new();
    for name in ["schur", "schur-product", "xyxy", "xyxy-distinct", "xyxy-values"] {
        out.push(bound(name, &Params::new()).unwrap());
    }
    for n in 1..=3 {
        out.push(bound("xny", &Params::new().with("n", n)).unwrap());
    }
    out.push(bound("tower2", &Params::new()).unwrap());
    out.push(bound("partial-products-2-1", &Params::new()).unwrap());
    out
}
