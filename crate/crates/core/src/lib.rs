//! Exact engines for purity moments of the Bures-Hall ensemble.
//!
//! [`ratcore`] supplies exact rationals, gamma quotients and polynomial
//! fractions. [`recurrence`] holds the biorthogonal coefficient tables,
//! [`kernel_integrals`] the exact kernel-product integrals and
//! [`closed_forms`] the moment API with its catalog of closed forms.

pub mod kernel_integrals;
pub mod ratcore;
pub mod recurrence;
pub mod closed_forms;
