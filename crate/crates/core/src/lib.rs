//! Commutative, blow-up and non-commutative ranks of linear matrix pencils.

pub mod brank;
pub mod exactmat;
pub mod io;
pub mod ncformula;
pub mod pencil;
mod rng;
pub mod wedge;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-matrices.md")]
    mod exact_matrices {}
    #[doc = include_str!("../../../book/src/ranks.md")]
    mod ranks {}
    #[doc = include_str!("../../../book/src/wedge.md")]
    mod wedge {}
    #[doc = include_str!("../../../book/src/border-rank.md")]
    mod border_rank {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
