//! Fuzzy multimodal Kripke models over linearly ordered Heyting algebras.
//!
//! The crate computes greatest presimulations and prebisimulations of seven
//! kinds between two finite models, weak (pre)bisimulations for explicit
//! formula sets, and compares the two through depth-bounded formula
//! enumeration.
//!
//! ```
//! use fuzzy_kripke::{model::KripkeModel, syntax::parse};
//!
//! let m = KripkeModel::from_json(r#"{
//!     "algebra": "godel",
//!     "worlds": ["u", "v"],
//!     "indices": [1],
//!     "relations": { "1": [["0", "0.7"], ["0", "0"]] },
//!     "valuation": { "p": ["0.2", "0.9"] }
//! }"#).unwrap();
//! let v = m.eval_vec(&parse("<>_1 p").unwrap()).unwrap();
//! assert_eq!(v.0[0].to_string(), "0.7");
//! ```

pub mod algebra;
pub mod bisim;
pub mod cli;
pub mod fuzzrel;
pub mod hm;
pub mod model;
pub mod par;
pub mod syntax;
pub mod weak;

pub use algebra::{Algebra, TruthValue};
pub use fuzzrel::{FuzzyMat, FuzzyVec};
pub use model::KripkeModel;
pub use par::Exec;
pub use syntax::{Formula, Fragment};
