//! DG categories: Table and Free presentations, functors, Ext tables.

pub mod ext;
pub mod free;
pub mod functor;
pub mod resolve;
pub mod table;

pub use ext::{ExtEntry, ExtTable, FiltrationProfile, Status};
pub use free::{FreeCategory, FreeElem, Generator, TruncatedHom, Word};
pub use resolve::{semi_free_resolve_category, CategoryResolution, CategoryResolutionReport, CategoryResolveBounds};
pub use table::{tensor_categories, Axiom, TableCategory, ValidationReport, Violation};
pub use functor::{check_quasi_equivalence, check_quasi_equivalence_probed, DgFunctor, FreeFunctor, QuasiBounds, TableFunctor, Verdict};
