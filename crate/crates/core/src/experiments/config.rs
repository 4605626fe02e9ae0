use std::fs;
use std::path::Path;

use crate::error::{ConfigError, Error, Violation};
use crate::params::SimParams;

/// Defaults merged with the `key = value` file at `path`, validated.
pub fn load_config(path: &Path) -> Result<SimParams, Error> {
    let mut params = SimParams::default();
    apply_config_file(&mut params, path)?;
    params.validate()?;
    Ok(params)
}

/// Applies a config file on top of `params` without validating the result.
pub fn apply_config_file(params: &mut SimParams, path: &Path) -> Result<(), Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    apply_config_str(params, &text, path)?;
    Ok(())
}

/// Parses flat UTF-8 `key = value` lines. Blank lines and `#` comments are
/// skipped; later keys override earlier ones.
pub fn apply_config_str(
    params: &mut SimParams,
    text: &str,
    path: &Path,
) -> Result<(), ConfigError> {
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| ConfigError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(parse_err("missing key".into()));
        }
        params
            .set(key, value)
            .map_err(|e| parse_err(e.to_string()))?;
    }
    Ok(())
}

/// Applies `key=value` overrides such as those given with `--set`.
pub fn apply_overrides<S: AsRef<str>>(
    params: &mut SimParams,
    overrides: &[S],
) -> Result<(), ConfigError> {
    let mut violations = Vec::new();
    for o in overrides {
        let o = o.as_ref();
        match o.split_once('=') {
            Some((k, v)) => params.set(k.trim(), v)?,
            None => violations.push(Violation::new(o, "expected key=value")),
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ConfigError::Invalid(violations))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn empty_file_gives_defaults() {
        let f = write("");
        assert_eq!(load_config(f.path()).unwrap(), SimParams::default());
    }

    #[test]
    fn partial_file_overrides_only_named_keys() {
        let f = write("# retention\nplasticity.i_bh_window = 0.4\n\nduration=5000 # ms\n");
        let loaded = load_config(f.path()).unwrap();
        let mut expected = SimParams::default();
        expected.plasticity.i_bh_window = 0.4;
        expected.duration = 5000.0;
        assert_eq!(loaded, expected);
        assert_eq!(
            loaded.diff(&SimParams::default()),
            vec!["duration", "plasticity.i_bh_window"]
        );
    }

    #[test]
    fn dt_violation_named() {
        let f = write("dt = 50\n");
        match load_config(f.path()) {
            Err(Error::Config(e @ ConfigError::Invalid(_))) => assert!(e.keys().contains(&"dt")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn every_violation_reported() {
        let f = write("n_synapses = 0\nplasticity.v_thl = 1.5\n");
        match load_config(f.path()) {
            Err(Error::Config(e)) => {
                let keys = e.keys();
                assert!(keys.contains(&"n_synapses") && keys.contains(&"plasticity.v_thl"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let f = write("dt = 0.05\n\nthis is not a pair\n");
        match load_config(f.path()) {
            Err(Error::Config(ConfigError::Parse { line, .. })) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let f = write("plasticity.nope = 1\n");
        match load_config(f.path()) {
            Err(Error::Config(ConfigError::Parse { line, message, .. })) => {
                assert_eq!(line, 1);
                assert!(message.contains("plasticity.nope"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_config(Path::new("/nonexistent/dir/sim.conf")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn overrides() {
        let mut p = SimParams::default();
        apply_overrides(&mut p, &["plasticity.i_wb=0.5", "n_synapses = 8"]).unwrap();
        assert_eq!(p.plasticity.i_wb, 0.5);
        assert_eq!(p.n_synapses, 8);
        assert!(apply_overrides(&mut p, &["oops"]).is_err());
    }
}
