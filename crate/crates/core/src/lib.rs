//! Local Fourier transforms of sheaf symbols over a finite-field model of an algebraically
//! closed field, local monodromy of hypergeometric sheaves, and brute-force exponential-sum
//! oracles to check them against.

pub mod arith;
pub mod field;
pub mod series;

pub use field::{build_field, suggest_degree, Field, FieldCtx, FieldDescriptor, FieldElem, FieldError};
pub use series::{LaurentSeries, SeriesDoc, SeriesError};
pub mod symbol;
pub use symbol::{
    as_reduce, canonicalize, descend, equal, is_indecomposable, is_irreducible, stabilizer, LocalSheaf, Point, Slope,
    Summand, SymbolDoc, SymbolError, TameChar, WildPart,
};
pub mod transform;
pub use transform::{
    legendre, legendre_branch, legendre_inverse, lft, rank_law_check, LegendreSolution, TransformError, TransformKind,
};
pub mod hyper;
pub use hyper::{hyp_local, hyp_local_recursive, mult0, mult_inf, At1, HypError, HypLocalData, HypLocalDoc, HypSpec};
pub mod numeric;
pub use numeric::{
    ft_trace, gauss_sum, hyp_sum, hyp_sum_table, hyp_trace_recursive, kloosterman, mult_char, CharEval, NumericError,
    TraceTable,
};
pub mod verify;
