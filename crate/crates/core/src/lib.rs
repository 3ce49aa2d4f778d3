//! Desk-scale toolkit for the arithmetic of iterated preimages.
//!
//! The crate is organised around five subsystems:
//!
//! * [`algebra`] — exact polynomial and rational-map algebra over big
//!   rationals (and other coefficient domains), including composition,
//!   Möbius conjugation, critical loci and power-composite structure.
//! * [`dynamics`] — dynamical classification (periodicity, PCF verdicts,
//!   exceptional points) and the special families: Chebyshev polynomials
//!   and flexible Lattès maps built from division polynomials.
//! * [`verify`] — certified complex-numeric verification: preimage trees
//!   with residual certificates, orbit-partition product checks, explicit
//!   root-of-unity witnesses, Chebyshev trace witnesses and Lattès fiber
//!   checks.
//! * [`padic`] — finite-precision p-adic arithmetic, Newton polygons,
//!   Hensel lifting, Eisenstein tower arithmetic with resultant norms,
//!   ramification breaks and Herbrand transition functions.
//! * [`apf`] — the norm-compatible tower pipeline: power-like reduction,
//!   fixed points, the normalised conjugated model, tower polynomials and
//!   an APF certificate.
//!
//! [`report`] holds the shared JSON formats used by the CLI.

pub mod algebra;
pub mod apf;
pub mod dynamics;
pub mod padic;
pub mod report;
pub mod ring;
pub mod verify;
