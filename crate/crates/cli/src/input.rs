//! Seed sources: JSON files, stdin, and named presets.

use std::io::Read;
use std::str::FromStr;

use cluster_core::acceptance::SL3_WORD;
use cluster_core::cartan::CartanMatrix;
use cluster_core::double_bruhat::parse_double_word;
use cluster_core::laurent::VarSet;
use cluster_core::seed::Seed;

use crate::error::CliError;

/// Preset names accepted by [`preset`].
pub const PRESETS: &str = "Cartan types such as A3, B2, D4, G2 (seed B(A)); rank2:b,c; sl3";

/// `A3`, `G2`, ... give the seed with matrix `B(A)`; `rank2:b,c` gives
/// `[[0,b],[-c,0]]`; `sl3` gives the double Bruhat cell seed of `(w0, w0)`
/// with word `1,2,1,2,1,-1,-2,-1`.
pub fn preset(name: &str) -> Result<Seed, CliError> {
    let name = name.trim();
    if name.eq_ignore_ascii_case("sl3") {
        let a = CartanMatrix::of_type(cluster_core::cartan::Family::A, 2)?;
        let w = parse_double_word(2, &SL3_WORD, &a)?;
        let b = w.btilde()?;
        return Ok(Seed::initial(VarSet::numbered("x", b.m()), b)?);
    }
    if let Some(rest) = name.strip_prefix("rank2:") {
        let bc: Vec<i64> = rest
            .split(',')
            .map(|s| s.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Input(format!("bad rank-2 preset `{name}`; expected rank2:b,c")))?;
        let [b, c] = bc[..] else {
            return Err(CliError::Input(format!("bad rank-2 preset `{name}`; expected rank2:b,c")));
        };
        if b <= 0 || c <= 0 {
            return Err(CliError::Input("rank-2 preset needs positive b and c".into()));
        }
        return Ok(Seed::from_exchange_matrix(vec![vec![0, b], vec![-c, 0]])?);
    }
    let a = CartanMatrix::from_str(name)
        .map_err(|_| CliError::Input(format!("unknown preset `{name}`; known: {PRESETS}")))?;
    Ok(a.distinguished_seed()?)
}

/// `@NAME` is a preset, `-` is stdin, anything else a path to seed JSON.
pub fn load_seed(source: &str) -> Result<Seed, CliError> {
    if let Some(name) = source.strip_prefix('@') {
        return preset(name);
    }
    let text = read_source(source)?;
    Seed::from_json_str(&text).map_err(|e| CliError::Input(format!("{source}: {e}")))
}

pub fn read_source(source: &str) -> Result<String, CliError> {
    let io = |source: std::io::Error, path: &str| CliError::Io {
        path: path.to_string(),
        source,
    };
    if source == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| io(e, "<stdin>"))?;
        Ok(text)
    } else {
        std::fs::read_to_string(source).map_err(|e| io(e, source))
    }
}

/// Comma-separated 1-based directions, returned 0-based. Empty text is the
/// empty sequence.
pub fn parse_directions(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(CliError::Input(format!("bad direction `{s}`; directions are 1-based integers"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        assert_eq!(preset("A2").unwrap().principal_part(), vec![vec![0, -1], vec![1, 0]]);
        assert_eq!(preset("rank2:1,4").unwrap().principal_part(), vec![vec![0, 1], vec![-4, 0]]);
        let sl3 = preset("sl3").unwrap();
        assert_eq!((sl3.m(), sl3.n()), (8, 4));
        assert!(preset("rank2:0,1").is_err());
        assert!(preset("Q7").is_err());
    }

    #[test]
    fn directions() {
        assert_eq!(parse_directions("1, 2,1").unwrap(), vec![0, 1, 0]);
        assert!(parse_directions("").unwrap().is_empty());
        assert!(parse_directions("0").is_err());
        assert!(parse_directions("1,x").is_err());
    }
}
