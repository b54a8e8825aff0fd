use serde::Serialize;

/// How a theoretical value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoryKind {
    ExactClosedForm,
    /// Exact up to floating point: a Gauss rule integrating a polynomial
    /// against its weight.
    QuadratureExact,
    AsymptoticLeadingTerms,
    /// Only an upper bound is available for these parameters.
    UpperBound,
}

impl TheoryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoryKind::ExactClosedForm => "exact-closed-form",
            TheoryKind::QuadratureExact => "quadrature-exact",
            TheoryKind::AsymptoticLeadingTerms => "asymptotic-leading-terms",
            TheoryKind::UpperBound => "upper-bound",
        }
    }

    /// Whether the value is an expectation that a Monte Carlo mean should hit.
    pub fn is_exact(self) -> bool {
        matches!(self, TheoryKind::ExactClosedForm | TheoryKind::QuadratureExact)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryValue {
    pub value: f64,
    pub kind: TheoryKind,
    pub valid_range: String,
    /// Order of the neglected terms, for asymptotic values.
    pub error_order: Option<String>,
}

impl TheoryValue {
    pub fn exact(value: f64, valid_range: impl Into<String>) -> Self {
        Self {
            value,
            kind: TheoryKind::ExactClosedForm,
            valid_range: valid_range.into(),
            error_order: None,
        }
    }

    pub fn quadrature(value: f64, valid_range: impl Into<String>) -> Self {
        Self {
            value,
            kind: TheoryKind::QuadratureExact,
            valid_range: valid_range.into(),
            error_order: None,
        }
    }

    pub fn asymptotic(
        value: f64,
        valid_range: impl Into<String>,
        error_order: impl Into<String>,
    ) -> Self {
        Self {
            value,
            kind: TheoryKind::AsymptoticLeadingTerms,
            valid_range: valid_range.into(),
            error_order: Some(error_order.into()),
        }
    }

    pub fn upper_bound(value: f64, valid_range: impl Into<String>) -> Self {
        Self {
            value,
            kind: TheoryKind::UpperBound,
            valid_range: valid_range.into(),
            error_order: None,
        }
    }
}
