pub mod cechnerve;
pub mod cli;
pub mod descent;
pub mod dgla;
pub mod exactalg;
pub mod params;
pub mod polydiff;
pub mod polyvec;
pub mod selftest;
pub mod solve;
