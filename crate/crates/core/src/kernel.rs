//! Radial kernel descriptions: `φ: ℕ → ℝ` given by a table or a closed form.

use serde::{Deserialize, Serialize};

use crate::degree::ExtendedDegree;
use crate::error::{Error, Result};
use crate::polynomials::p_sequence;

/// Current version of the kernel JSON schema.
pub const KERNEL_SCHEMA: u32 = 1;

/// A closed-form building block of a mixture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Component {
    /// `φ(n) = s^n` (with `0^0 = 1`).
    Geometric { s: f64 },
    /// `φ(n) = P_n^{(q)}(s)`.
    TreeEigen { q: ExtendedDegree, s: f64 },
}

impl Component {
    fn s(&self) -> f64 {
        match *self {
            Component::Geometric { s } | Component::TreeEigen { s, .. } => s,
        }
    }

    fn degree(&self) -> ExtendedDegree {
        match *self {
            Component::Geometric { .. } => ExtendedDegree::INFINITE,
            Component::TreeEigen { q, .. } => q,
        }
    }

    fn values(&self, n_max: usize) -> Vec<f64> {
        p_sequence(self.degree(), n_max, self.s())
    }
}

/// A component together with its positive mixing weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedComponent {
    pub component: Component,
    pub weight: f64,
}

/// A radial function `φ`, either tabulated or in closed form.
#[derive(Clone, Debug, PartialEq)]
pub enum RadialKernelSpec {
    /// `φ(0), …, φ(n_max)` together with the declared limits of `φ(2n)` and
    /// `φ(2n+1)`. Values beyond the table are never extrapolated.
    Table { values: Vec<f64>, l0: f64, l1: f64 },
    Geometric { s: f64 },
    TreeEigen { q: ExtendedDegree, s: f64 },
    Mixture(Vec<WeightedComponent>),
}

impl RadialKernelSpec {
    pub fn table(values: Vec<f64>, l0: f64, l1: f64) -> Result<Self> {
        let spec = RadialKernelSpec::Table { values, l0, l1 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn geometric(s: f64) -> Result<Self> {
        let spec = RadialKernelSpec::Geometric { s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn tree_eigen(q: ExtendedDegree, s: f64) -> Result<Self> {
        let spec = RadialKernelSpec::TreeEigen { q, s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn mixture(components: Vec<WeightedComponent>) -> Result<Self> {
        let spec = RadialKernelSpec::Mixture(components);
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the structural invariants of each form.
    pub fn validate(&self) -> Result<()> {
        fn check_s(s: f64) -> Result<()> {
            if !(-1.0..=1.0).contains(&s) {
                return Err(Error::InvalidKernel(format!("s = {s} is outside [-1, 1]")));
            }
            Ok(())
        }
        match self {
            RadialKernelSpec::Table { values, l0, l1 } => {
                if values.is_empty() {
                    return Err(Error::InvalidKernel("table has no values".into()));
                }
                if values.iter().chain([l0, l1]).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidKernel("table contains non-finite values".into()));
                }
                Ok(())
            }
            RadialKernelSpec::Geometric { s } | RadialKernelSpec::TreeEigen { s, .. } => check_s(*s),
            RadialKernelSpec::Mixture(components) => {
                if components.is_empty() {
                    return Err(Error::InvalidKernel("mixture has no components".into()));
                }
                for c in components {
                    if !(c.weight > 0.0 && c.weight.is_finite()) {
                        return Err(Error::InvalidKernel(format!(
                            "mixture weight {} is not positive",
                            c.weight
                        )));
                    }
                    check_s(c.component.s())?;
                }
                Ok(())
            }
        }
    }

    /// Largest index at which `φ` is available, `None` for closed forms.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            RadialKernelSpec::Table { values, .. } => Some(values.len() - 1),
            _ => None,
        }
    }

    /// `φ(0), …, φ(n_max)`.
    pub fn values(&self, n_max: usize) -> Result<Vec<f64>> {
        match self {
            RadialKernelSpec::Table { values, .. } => {
                if n_max >= values.len() {
                    return Err(Error::InsufficientData {
                        needed: n_max,
                        available: values.len() - 1,
                    });
                }
                Ok(values[..=n_max].to_vec())
            }
            RadialKernelSpec::Geometric { s } => {
                Ok(Component::Geometric { s: *s }.values(n_max))
            }
            RadialKernelSpec::TreeEigen { q, s } => {
                Ok(Component::TreeEigen { q: *q, s: *s }.values(n_max))
            }
            RadialKernelSpec::Mixture(components) => {
                let mut out = vec![0.0; n_max + 1];
                for c in components {
                    for (o, v) in out.iter_mut().zip(c.component.values(n_max)) {
                        *o += c.weight * v;
                    }
                }
                Ok(out)
            }
        }
    }

    /// `φ(n)`.
    pub fn value(&self, n: usize) -> Result<f64> {
        Ok(self.values(n)?[n])
    }

    /// Parses the versioned JSON kernel document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: KernelDoc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&KernelDoc::from(self)).expect("kernel documents always serialize")
    }
}

/// On-disk shape of a kernel, `{"schema": 1, "form": ..., ...}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDoc {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<ExtendedDegree>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<KernelDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

fn default_schema() -> u32 {
    KERNEL_SCHEMA
}

fn missing(field: &str, form: &str) -> Error {
    Error::InvalidKernel(format!("form {form:?} requires field {field:?}"))
}

impl KernelDoc {
    fn component(&self) -> Result<Component> {
        let s = self.s.ok_or_else(|| missing("s", &self.form))?;
        match self.form.as_str() {
            "geometric" => Ok(Component::Geometric { s }),
            "tree_eigen" => Ok(Component::TreeEigen {
                q: self.q.ok_or_else(|| missing("q", &self.form))?,
                s,
            }),
            other => Err(Error::InvalidKernel(format!(
                "mixture components must be geometric or tree_eigen, got {other:?}"
            ))),
        }
    }
}

impl TryFrom<KernelDoc> for RadialKernelSpec {
    type Error = Error;

    fn try_from(doc: KernelDoc) -> Result<Self> {
        if doc.schema != KERNEL_SCHEMA {
            return Err(Error::InvalidKernel(format!("unsupported schema version {}", doc.schema)));
        }
        match doc.form.as_str() {
            "table" => RadialKernelSpec::table(
                doc.values.clone().ok_or_else(|| missing("values", "table"))?,
                doc.l0.ok_or_else(|| missing("l0", "table"))?,
                doc.l1.ok_or_else(|| missing("l1", "table"))?,
            ),
            "geometric" | "tree_eigen" => match doc.component()? {
                Component::Geometric { s } => RadialKernelSpec::geometric(s),
                Component::TreeEigen { q, s } => RadialKernelSpec::tree_eigen(q, s),
            },
            "mixture" => {
                let parts = doc.components.as_ref().ok_or_else(|| missing("components", "mixture"))?;
                let components = parts
                    .iter()
                    .map(|p| {
                        Ok(WeightedComponent {
                            component: p.component()?,
                            weight: p.weight.ok_or_else(|| missing("weight", &p.form))?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                RadialKernelSpec::mixture(components)
            }
            other => Err(Error::InvalidKernel(format!("unknown form {other:?}"))),
        }
    }
}

impl From<&Component> for KernelDoc {
    fn from(c: &Component) -> Self {
        match *c {
            Component::Geometric { s } => KernelDoc { form: "geometric".into(), s: Some(s), ..Self::base() },
            Component::TreeEigen { q, s } => {
                KernelDoc { form: "tree_eigen".into(), s: Some(s), q: Some(q), ..Self::base() }
            }
        }
    }
}

impl KernelDoc {
    fn base() -> Self {
        KernelDoc { schema: KERNEL_SCHEMA, ..Default::default() }
    }
}

impl From<&RadialKernelSpec> for KernelDoc {
    fn from(spec: &RadialKernelSpec) -> Self {
        match spec {
            RadialKernelSpec::Table { values, l0, l1 } => KernelDoc {
                form: "table".into(),
                values: Some(values.clone()),
                l0: Some(*l0),
                l1: Some(*l1),
                ..Self::base()
            },
            RadialKernelSpec::Geometric { s } => (&Component::Geometric { s: *s }).into(),
            RadialKernelSpec::TreeEigen { q, s } => (&Component::TreeEigen { q: *q, s: *s }).into(),
            RadialKernelSpec::Mixture(components) => KernelDoc {
                form: "mixture".into(),
                components: Some(
                    components
                        .iter()
                        .map(|c| {
                            let mut d = KernelDoc::from(&c.component);
                            d.schema = KERNEL_SCHEMA;
                            d.weight = Some(c.weight);
                            d
                        })
                        .collect(),
                ),
                ..Self::base()
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_evaluate() {
        let g = RadialKernelSpec::geometric(0.5).unwrap();
        assert_eq!(g.values(3).unwrap(), vec![1.0, 0.5, 0.25, 0.125]);
        assert_eq!(RadialKernelSpec::geometric(0.0).unwrap().value(0).unwrap(), 1.0);
        let t = RadialKernelSpec::tree_eigen(ExtendedDegree::finite(2).unwrap(), 0.0).unwrap();
        assert_eq!(t.values(4).unwrap(), vec![1.0, 0.0, -0.5, 0.0, 0.25]);
        let m = RadialKernelSpec::mixture(vec![
            WeightedComponent { component: Component::Geometric { s: 1.0 }, weight: 0.3 },
            WeightedComponent {
                component: Component::TreeEigen { q: ExtendedDegree::finite(2).unwrap(), s: 0.0 },
                weight: 0.7,
            },
        ])
        .unwrap();
        let v = m.values(2).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 0.3).abs() < 1e-15 && (v[2] + 0.05).abs() < 1e-15);
    }

    #[test]
    fn table_is_never_extrapolated() {
        let t = RadialKernelSpec::table(vec![1.0, 0.5, 0.25], 0.0, 0.0).unwrap();
        assert_eq!(t.max_index(), Some(2));
        assert!(matches!(
            t.values(3),
            Err(Error::InsufficientData { needed: 3, available: 2 })
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(RadialKernelSpec::geometric(1.5).is_err());
        assert!(RadialKernelSpec::table(vec![], 0.0, 0.0).is_err());
        assert!(RadialKernelSpec::mixture(vec![]).is_err());
        assert!(RadialKernelSpec::mixture(vec![WeightedComponent {
            component: Component::Geometric { s: 0.2 },
            weight: -1.0
        }])
        .is_err());
        assert!(RadialKernelSpec::from_json(r#"{"schema":2,"form":"geometric","s":0.5}"#).is_err());
        assert!(RadialKernelSpec::from_json(r#"{"schema":1,"form":"tree_eigen","s":0.5}"#).is_err());
        assert!(RadialKernelSpec::from_json(r#"{"schema":1,"form":"blob"}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let docs = [
            r#"{"schema":1,"form":"table","values":[1.0,0.0,-1.0],"l0":-1.0,"l1":0.0}"#,
            r#"{"schema":1,"form":"geometric","s":-0.7}"#,
            r#"{"schema":1,"form":"tree_eigen","s":0.25,"q":3}"#,
            r#"{"schema":1,"form":"tree_eigen","s":0.25,"q":"inf"}"#,
            r#"{"schema":1,"form":"mixture","components":[{"form":"geometric","s":1.0,"weight":0.3},{"form":"tree_eigen","s":0.0,"q":2,"weight":0.7}]}"#,
        ];
        for d in docs {
            let spec = RadialKernelSpec::from_json(d).unwrap();
            let again = RadialKernelSpec::from_json(&spec.to_json()).unwrap();
            assert_eq!(spec, again);
        }
    }
}
