//! Intrinsic polarization solver and the induced degree bounds.
//!
//! For a colored graph the intrinsic polarization is the rational vector
//! `x` with `G·x = d` (the color vector), determined modulo the radical;
//! its square `xᵀ·d` depends only on the graph and bounds twice the degree
//! of any geometric realization.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::exact::BigRat;
use crate::fano::{ColoredGraph, GraphClass};
use crate::{Error, Result};

/// Outcome of the linear solve `G·x = d`.
#[derive(Clone, PartialEq, Debug)]
pub struct Polarization {
    pub exists: bool,
    /// A representative solution (free variables set to zero under the
    /// fixed pivot order); empty when no solution exists.
    pub coefficients: Vec<BigRat>,
    /// `xᵀ·d`; independent of the representative whenever it exists.
    pub square: Option<BigRat>,
}

/// The degree bound extracted from a polarization square.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum DegreeBound {
    /// The graph can only be geometric in degrees `2h` with `h <= h_max`.
    Bounded { h_max: i64 },
    /// The square is below 2, so no geometric degree `h >= 1` exists.
    NoPositiveDegree,
    /// No intrinsic polarization: not geometric in any degree spanned by
    /// the hyperbolic lattice.
    NotGeometric,
}

/// Machine-checkable certificate packaging classification and bound.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct FinitenessCertificate {
    pub schema_version: u32,
    pub graph_hash: String,
    pub class: GraphClass,
    pub hyperbolic: bool,
    pub polarization: PolarizationJson,
    pub h_max: Option<i64>,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct PolarizationJson {
    pub exists: bool,
    pub coeffs: Vec<String>,
    pub square: Option<String>,
}

impl From<&Polarization> for PolarizationJson {
    fn from(p: &Polarization) -> Self {
        PolarizationJson {
            exists: p.exists,
            coeffs: p.coefficients.iter().map(|c| c.to_string()).collect(),
            square: p.square.as_ref().map(|s| s.to_string()),
        }
    }
}

/// Solve `G·x = colors` exactly over the rationals.
///
/// Existence is equivalent to the color vector lying in the column space
/// of the Gram matrix (equivalently, being orthogonal to the radical).
pub fn intrinsic_polarization(graph: &ColoredGraph) -> Polarization {
    let gram = graph.gram();
    let colors: Vec<BigInt> = graph.colors().iter().map(|&c| BigInt::from(c)).collect();
    // Inconsistency means the colors are not in the column space.
    match gram.solve(&colors).expect("dimensions agree by construction") {
        None => Polarization {
            exists: false,
            coefficients: Vec::new(),
            square: None,
        },
        Some(x) => {
            let square: BigRat = x
                .iter()
                .zip(&colors)
                .map(|(xi, di)| xi * BigRat::from(di.clone()))
                .sum();
            Polarization {
                exists: true,
                coefficients: x,
                square: Some(square),
            }
        }
    }
}

/// Largest integer `h` with `2h <= square`, or the reason none exists.
/// Only defined for hyperbolic graphs.
pub fn degree_bound(graph: &ColoredGraph) -> Result<DegreeBound> {
    if graph.classify() != GraphClass::Hyperbolic {
        return Err(Error::NotHyperbolic);
    }
    Ok(degree_bound_unchecked(graph))
}

fn degree_bound_unchecked(graph: &ColoredGraph) -> DegreeBound {
    let p = intrinsic_polarization(graph);
    match p.square {
        None => DegreeBound::NotGeometric,
        Some(square) => {
            let h_max = (square / BigRat::from(BigInt::from(2))).floor().to_integer();
            if h_max < BigInt::one() {
                DegreeBound::NoPositiveDegree
            } else {
                let h: i64 = (&h_max).try_into().unwrap_or(i64::MAX);
                DegreeBound::Bounded { h_max: h }
            }
        }
    }
}

/// Certificate for any graph: classification plus the bound when the graph
/// is hyperbolic.
pub fn finiteness_certificate(graph: &ColoredGraph) -> FinitenessCertificate {
    let class = graph.classify();
    let polarization = intrinsic_polarization(graph);
    let h_max = if class == GraphClass::Hyperbolic {
        match degree_bound_unchecked(graph) {
            DegreeBound::Bounded { h_max } => Some(h_max),
            _ => None,
        }
    } else {
        None
    };
    FinitenessCertificate {
        schema_version: 1,
        graph_hash: graph.hash(),
        class,
        hyperbolic: class == GraphClass::Hyperbolic,
        polarization: PolarizationJson::from(&polarization),
        h_max,
    }
}

/// `square` as an exact rational in lowest terms, for callers that need it.
pub fn polarization_square(graph: &ColoredGraph) -> Option<BigRat> {
    intrinsic_polarization(graph).square
}
