//! Reference-free evaluation of machine translation.
//!
//! A hypothesis is scored directly against its source sentence. Both sides
//! live in embedding spaces that may be re-mapped onto each other with a
//! linear transform fitted on a bilingual lexicon. Scores come either from an
//! exact word mover's distance over n-gram embeddings or from a cosine of
//! pooled sentence vectors, optionally fused with a target-side n-gram
//! language model.
//!
//! ```
//! use reffree::metrics::{MetricConfig, Scorer};
//! use reffree::vecspace::EmbeddingSpace;
//!
//! let src = EmbeddingSpace::from_rows(2, [("hund".to_string(), vec![1.0, 0.0])]).unwrap();
//! let tgt = EmbeddingSpace::from_rows(2, [("dog".to_string(), vec![1.0, 0.0])]).unwrap();
//! let config = MetricConfig::mover(1);
//! let scorer = Scorer::new(&src, &tgt, &config).unwrap();
//! let c = scorer.score_components(&["hund"], &["dog"], None).unwrap();
//! assert_eq!(c.similarity, 0.0);
//! ```

pub mod cli;
pub mod error;
pub mod eval;
pub mod io;
pub mod lm;
pub mod metrics;
pub mod remap;
pub mod synth;
pub mod transport;
pub mod vecspace;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/embeddings.md")]
    mod embeddings {}
    #[doc = include_str!("../../../book/src/transport.md")]
    mod transport {}
    #[doc = include_str!("../../../book/src/remapping.md")]
    mod remapping {}
    #[doc = include_str!("../../../book/src/language-model.md")]
    mod language_model {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/file-formats.md")]
    mod file_formats {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
