use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BinaryOp, FunctionExpr, Node, UnaryOp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}` (expected const, exp_linear, exp_affine or poly_shift)")]
    UnknownFamily(String),
    #[error("family `{family}` is missing parameter `{param}`")]
    MissingParam { family: &'static str, param: &'static str },
    #[error("family `{family}` has no parameter `{param}`")]
    UnexpectedParam { family: &'static str, param: String },
    #[error("parameter `{param}` = {value} out of range: {requirement}")]
    OutOfRange { param: &'static str, value: f64, requirement: &'static str },
}

/// The registered parametric families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `c`, with `c > 0`.
    Const,
    /// `e^(k·x)`.
    ExpLinear,
    /// `c·e^(k·x)`, with `c > 0`.
    ExpAffine,
    /// `x^p + q`, with `q > 0`.
    PolyShift,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Const, Family::ExpLinear, Family::ExpAffine, Family::PolyShift];

    pub fn name(self) -> &'static str {
        match self {
            Family::Const => "const",
            Family::ExpLinear => "exp_linear",
            Family::ExpAffine => "exp_affine",
            Family::PolyShift => "poly_shift",
        }
    }

    /// Parameter names in canonical order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Const => &["c"],
            Family::ExpLinear => &["k"],
            Family::ExpAffine => &["c", "k"],
            Family::PolyShift => &["p", "q"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.name() == s)
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

/// A family name together with concrete parameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl FamilySpec {
    pub fn new<'a>(name: &str, params: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        FamilySpec {
            name: name.to_string(),
            params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub fn family(&self) -> Result<Family, FamilyError> {
        self.name.parse()
    }

    /// Builds the expression tree for this family member after validating
    /// the parameter names and ranges.
    pub fn instantiate(&self) -> Result<FunctionExpr, FamilyError> {
        let family = self.family()?;
        let names = family.param_names();
        if let Some(extra) = self.params.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(FamilyError::UnexpectedParam { family: family.name(), param: extra.clone() });
        }
        let get = |param: &'static str| -> Result<f64, FamilyError> {
            let value = *self
                .params
                .get(param)
                .ok_or(FamilyError::MissingParam { family: family.name(), param })?;
            if value.is_finite() {
                Ok(value)
            } else {
                Err(FamilyError::OutOfRange { param, value, requirement: "finite" })
            }
        };
        let positive = |param: &'static str| -> Result<f64, FamilyError> {
            let value = get(param)?;
            if value > 0.0 {
                Ok(value)
            } else {
                Err(FamilyError::OutOfRange { param, value, requirement: "> 0" })
            }
        };
        let kx = |k: f64| Node::Binary(BinaryOp::Mul, Box::new(Node::Const(k)), Box::new(Node::Var));
        let root = match family {
            Family::Const => Node::Const(positive("c")?),
            Family::ExpLinear => Node::Unary(UnaryOp::Exp, Box::new(kx(get("k")?))),
            Family::ExpAffine => {
                let c = positive("c")?;
                let k = get("k")?;
                Node::Binary(
                    BinaryOp::Mul,
                    Box::new(Node::Const(c)),
                    Box::new(Node::Unary(UnaryOp::Exp, Box::new(kx(k)))),
                )
            }
            Family::PolyShift => {
                let p = get("p")?;
                let q = positive("q")?;
                Node::Binary(
                    BinaryOp::Add,
                    Box::new(Node::Binary(BinaryOp::Pow, Box::new(Node::Var), Box::new(Node::Const(p)))),
                    Box::new(Node::Const(q)),
                )
            }
        };
        Ok(FunctionExpr::new(root))
    }
}

/// `name(k=v,...)`, parameters in canonical order.
impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v:?}")?;
        }
        f.write_str(")")
    }
}
