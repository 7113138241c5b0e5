//! Shared fixtures for the benchmark targets.

use canprod::zero_model::integer_lattice;
use canprod::{CompiledProduct, ProductVariant, ZeroSequence};

pub fn lattice(n: usize) -> ZeroSequence {
    integer_lattice(n).expect("lattice fixture")
}

pub fn compiled_lattice(n: usize) -> CompiledProduct {
    CompiledProduct::compile(&lattice(n), &ProductVariant::Plain).expect("compile fixture")
}
