//! Shared test support: brute-force oracles and random fixtures.
#![allow(dead_code)]

pub mod gen;
pub mod oracle;

/// The dictionary behind the golden rows.
pub const GOLDEN_DICT: &str = "\
kataba,ktb.V:aP3ms
kutiba,ktb.V:bP3ms
katGaba,ktGb.V:aP3ms
qamaru,qamar.N:msDN
Mamosu,Mamos.N:fsDN
IiEoraAbN,IiEoraAb.N:msiN
kitaAbFA,kitaAb.N:msiA
taAniy,taAniy.A:msD
tarawona,raOaY.V:aI2mpE
";

pub const NOUNS: &str = include_str!("../../data/grammars/nouns.grm");
pub const CLITICS: &str = include_str!("../../data/grammars/clitics.grm");
