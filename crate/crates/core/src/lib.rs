pub mod field;
pub mod gadgets;
pub mod geom;
pub mod relations;
pub mod rigidity;
pub mod verify;
pub mod witness;

/// The book chapters, compiled here so their snippets run as doc-tests.
#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/field.md")]
    pub mod field {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    pub mod geometry {}
    #[doc = include_str!("../../../book/src/gadgets.md")]
    pub mod gadgets {}
    #[doc = include_str!("../../../book/src/relations.md")]
    pub mod relations {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
    #[doc = include_str!("../../../book/src/rigidity.md")]
    pub mod rigidity {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
