//! Pre-caustics, caustics, level surfaces, Maxwell sets and their singularities.

pub mod caustic;
pub mod curve;
pub mod implicit;
pub mod maxwell;
pub mod svg;

pub use caustic::{
    caustic_curve, complex_double_points, detect_perestroika, pre_caustic, CausticFamily, ComplexDoublePoint,
    LambdaGrid, Perestroika,
};
pub use curve::{detect_generalised_cusps, CurveEval, CurveKind, CurveSample, CuspHit, Label, ParamCurve};
pub use implicit::{
    intersections, level_surface_curve, pre_caustic_at, pre_level_polynomial, pre_maxwell_curve, pre_maxwell_polynomial,
    singular_points, CurvePoint, ImplicitCurve, PreMaxwell,
};
pub use maxwell::{
    double_discriminant_at, maxwell_curve, maxwell_partner, maxwell_set, normal, tangency_residual, MaxwellSet,
    NormalKind,
};
pub use svg::render_svg;
