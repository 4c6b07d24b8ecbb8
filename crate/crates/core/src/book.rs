#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/fields.md")]
mod fields {}
#[doc = include_str!("../../../book/src/isometries.md")]
mod isometries {}
#[doc = include_str!("../../../book/src/reduction.md")]
mod reduction {}
#[doc = include_str!("../../../book/src/membership.md")]
mod membership {}
#[doc = include_str!("../../../book/src/finite_index.md")]
mod finite_index {}
#[doc = include_str!("../../../book/src/domains.md")]
mod domains {}
#[doc = include_str!("../../../book/src/bench.md")]
mod bench {}
