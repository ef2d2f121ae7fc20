//! Exterior algebra with matrix-valued jet coefficients, used to check
//! the transgression identities for the Chern character pointwise.

pub mod chern;
pub mod deligne;
pub mod form;
pub mod jet;
pub mod scene;

pub use chern::{
    alpha_n, alpha_terms, ch_polynomial, characteristic_form, curvature, number_operator,
    theorem1_residual, top_alpha_coefficient, AlphaCoefficients, ChNormalization, ConnectionForms,
    Conventions, ResidualReport,
};
pub use deligne::{deligne_membership, DeligneCase, MembershipReport};
pub use form::{Differential, MultiForm};
pub use jet::{JetContext, MatJet};
pub use scene::{required_jet_order, JetMetric, JetSource, MetricFamily, PolyTerm, TestScene};
