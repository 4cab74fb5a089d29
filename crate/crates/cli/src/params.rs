//! Flat `key = value` parameter sets.
//!
//! Presets, config files and command-line flags all produce a [`Params`];
//! later layers override earlier ones key by key.

use std::collections::BTreeMap;
use std::str::FromStr;

use ahe_core::bench::{CorruptionPattern, CorruptionSpec};
use ahe_core::{
    AheConfig, CoefficientParams, LiftMode, PlainParams, Preset, RestoreMode, RestoreParams, VarcoefDrConfig,
    VarcoefSolver,
};

use crate::error::{CliError, CliResult};

const COEFFICIENT_KEYS: [&str; 5] = ["a0", "a1", "b0", "b1", "sigma"];
const SOLVER_KEYS: [&str; 3] = ["time", "substeps", "cn_steps"];

fn is_known(key: &str) -> bool {
    const PLAIN: [&str; 7] = ["a", "b", "lift", "smoothing", "steps", "restore", "layers"];
    const RESTORE: [&str; 3] = ["iterations", "epsilon", "mode"];
    const CORRUPTION: [&str; 4] = ["fraction", "line_width", "pattern", "seed"];
    if let Some(rest) = key.strip_prefix("step2.").or_else(|| key.strip_prefix("step4.")) {
        return COEFFICIENT_KEYS.contains(&rest) || SOLVER_KEYS.contains(&rest);
    }
    [&PLAIN[..], &RESTORE, &CORRUPTION, &COEFFICIENT_KEYS, &SOLVER_KEYS]
        .iter()
        .any(|group| group.contains(&key))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn set(&mut self, key: &str, value: impl ToString) -> CliResult<()> {
        let key = key.trim();
        if !is_known(key) {
            return Err(CliError::usage(format!("unknown parameter '{key}'")));
        }
        self.0.insert(key.to_string(), value.to_string().trim().to_string());
        Ok(())
    }

    /// Parses `key=value`.
    pub fn set_pair(&mut self, pair: &str) -> CliResult<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("expected key=value, got '{pair}'")))?;
        self.set(k, v)
    }

    /// Config file text: one `key = value` per line, `#` starts a comment.
    pub fn parse_config(text: &str) -> CliResult<Params> {
        let mut p = Params::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            p.set_pair(line)
                .map_err(|e| CliError::usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(p)
    }

    pub fn overlay(&mut self, other: &Params) {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), v.clone());
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::usage(format!("invalid value '{raw}' for '{key}'"))),
        }
    }

    fn read<T: FromStr>(&self, key: &str, slot: &mut T) -> CliResult<()> {
        if let Some(v) = self.get(key)? {
            *slot = v;
        }
        Ok(())
    }

    fn read_with<T>(&self, key: &str, slot: &mut T, parse: impl Fn(&str) -> Option<T>) -> CliResult<()> {
        if let Some(raw) = self.0.get(key) {
            *slot = parse(raw).ok_or_else(|| CliError::usage(format!("invalid value '{raw}' for '{key}'")))?;
        }
        Ok(())
    }

    fn coefficients(&self, prefix: &str, base: CoefficientParams) -> CliResult<CoefficientParams> {
        let mut c = base;
        self.read(&format!("{prefix}a0"), &mut c.a0)?;
        self.read(&format!("{prefix}a1"), &mut c.a1)?;
        self.read(&format!("{prefix}b0"), &mut c.b0)?;
        self.read(&format!("{prefix}b1"), &mut c.b1)?;
        self.read(&format!("{prefix}sigma"), &mut c.sigma)?;
        c.validate()?;
        Ok(c)
    }

    fn solver(&self, prefix: &str, base: VarcoefSolver) -> CliResult<VarcoefSolver> {
        let mut s = base;
        self.read(&format!("{prefix}time"), &mut s.time)?;
        self.read(&format!("{prefix}substeps"), &mut s.substeps)?;
        self.read(&format!("{prefix}cn_steps"), &mut s.cn_steps)?;
        Ok(s)
    }

    fn restore(&self, base: RestoreParams) -> CliResult<RestoreParams> {
        let mut r = base;
        self.read("iterations", &mut r.iterations)?;
        self.read("epsilon", &mut r.epsilon)?;
        self.read_with("mode", &mut r.mode, parse_mode)?;
        r.validate()?;
        Ok(r)
    }

    pub fn corruption(&self) -> CliResult<CorruptionSpec> {
        let mut spec = CorruptionSpec::lines(0.85, 3, 0);
        self.read("fraction", &mut spec.target_fraction)?;
        self.read("line_width", &mut spec.line_width)?;
        self.read("seed", &mut spec.seed)?;
        self.read_with("pattern", &mut spec.pattern, |s| match s {
            "lines" => Some(CorruptionPattern::Lines),
            "pixels" => Some(CorruptionPattern::RandomPixels),
            _ => None,
        })?;
        spec.validate()?;
        Ok(spec)
    }

    /// Plain-diffusion settings; restoration defaults to 10 static rounds.
    pub fn plain(&self) -> CliResult<(PlainParams, Option<RestoreParams>)> {
        let mut p = PlainParams::default();
        self.read("a", &mut p.a)?;
        self.read("b", &mut p.b)?;
        self.read("layers", &mut p.layers)?;
        self.read("smoothing", &mut p.smoothing_radius)?;
        self.read("time", &mut p.time)?;
        if let Some(steps) = self.get("steps")? {
            p.steps = Some(steps);
        }
        self.read_with("lift", &mut p.lift, |s| match s {
            "gradient" => Some(LiftMode::Gradient),
            "trivial" => Some(LiftMode::Trivial),
            _ => None,
        })?;
        let mut enabled = true;
        self.read("restore", &mut enabled)?;
        let restore = if enabled {
            Some(self.restore(RestoreParams { iterations: 10, epsilon: 0.1, mode: RestoreMode::Static })?)
        } else {
            None
        };
        Ok((p, restore))
    }

    /// Varying-coefficient restoration; unset keys fall back to the `fig4` preset.
    pub fn varcoef_dr(&self) -> CliResult<VarcoefDrConfig> {
        let base = Preset::Fig4.varcoef_dr().expect("fig4 has restoration settings");
        let mut cfg = VarcoefDrConfig {
            coefficients: self.coefficients("", base.coefficients)?,
            restore: self.restore(base.restore)?,
            solver: self.solver("", base.solver)?,
            layers: base.layers,
        };
        self.read("layers", &mut cfg.layers)?;
        Ok(cfg)
    }

    pub fn ahe(&self) -> CliResult<AheConfig> {
        let base = AheConfig::default();
        let mut cfg = AheConfig {
            step2: self.coefficients("step2.", base.step2)?,
            step2_solver: self.solver("step2.", base.step2_solver)?,
            step4: self.coefficients("step4.", base.step4)?,
            step4_solver: self.solver("step4.", base.step4_solver)?,
            ..base
        };
        self.read("layers", &mut cfg.layers)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_mode(s: &str) -> Option<RestoreMode> {
    match s {
        "static" => Some(RestoreMode::Static),
        "dynamic" => Some(RestoreMode::Dynamic),
        _ => None,
    }
}

fn mode_name(m: RestoreMode) -> &'static str {
    match m {
        RestoreMode::Static => "static",
        RestoreMode::Dynamic => "dynamic",
    }
}

/// Every key a preset pins down.
pub fn preset_params(preset: Preset) -> Params {
    let mut p = Params::default();
    let mut put = |k: &str, v: String| p.set(k, v).expect("preset keys are known");
    let spec = preset.corruption(0);
    put("fraction", spec.target_fraction.to_string());
    put("line_width", spec.line_width.to_string());
    match preset.varcoef_dr() {
        Some(cfg) => {
            let c = cfg.coefficients;
            for (k, v) in COEFFICIENT_KEYS.iter().zip([c.a0, c.a1, c.b0, c.b1, c.sigma]) {
                put(k, v.to_string());
            }
            put("iterations", cfg.restore.iterations.to_string());
            put("epsilon", cfg.restore.epsilon.to_string());
            put("mode", mode_name(cfg.restore.mode).to_string());
            put("layers", cfg.layers.to_string());
        }
        None => {
            let cfg = AheConfig::default();
            for (prefix, c) in [("step2.", cfg.step2), ("step4.", cfg.step4)] {
                for (k, v) in COEFFICIENT_KEYS.iter().zip([c.a0, c.a1, c.b0, c.b1, c.sigma]) {
                    put(&format!("{prefix}{k}"), v.to_string());
                }
            }
            put("layers", cfg.layers.to_string());
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_parses_with_comments() {
        let p = Params::parse_config("# header\n a0 = 2.5 \n\nmode=static # trailing\n").unwrap();
        assert_eq!(p.get::<f64>("a0").unwrap(), Some(2.5));
        assert_eq!(p.get::<String>("mode").unwrap().as_deref(), Some("static"));
    }

    #[test]
    fn unknown_keys_and_bad_values_are_usage_errors() {
        assert!(matches!(Params::parse_config("colour = red"), Err(CliError::Usage(_))));
        assert!(matches!(Params::parse_config("just words"), Err(CliError::Usage(_))));
        let mut p = Params::default();
        p.set("a0", "abc").unwrap();
        assert!(matches!(p.varcoef_dr(), Err(CliError::Usage(_))));
    }

    #[test]
    fn fig8_preset_is_loaded_verbatim() {
        let cfg = preset_params(Preset::Fig8).varcoef_dr().unwrap();
        let c = cfg.coefficients;
        assert_eq!((c.a0, c.a1, c.b0, c.b1, c.sigma), (1.1, 10.0, 0.1, 0.4, 0.1));
        assert_eq!(cfg.restore.iterations, 100);
        assert_eq!(cfg.restore.epsilon, 1.0);
        assert_eq!(cfg, Preset::Fig8.varcoef_dr().unwrap());
    }

    #[test]
    fn ahe_preset_matches_defaults() {
        assert_eq!(preset_params(Preset::AheDefault).ahe().unwrap(), AheConfig::default());
    }

    #[test]
    fn later_layers_win() {
        let mut p = preset_params(Preset::Fig4);
        p.overlay(&Params::parse_config("a0 = 3").unwrap());
        let mut flags = Params::default();
        flags.set("iterations", 7).unwrap();
        p.overlay(&flags);
        let cfg = p.varcoef_dr().unwrap();
        assert_eq!(cfg.coefficients.a0, 3.0);
        assert_eq!(cfg.coefficients.a1, 10.0);
        assert_eq!(cfg.restore.iterations, 7);
    }

    #[test]
    fn plain_restore_can_be_disabled() {
        let mut p = Params::default();
        assert!(p.plain().unwrap().1.is_some());
        p.set("restore", "false").unwrap();
        assert!(p.plain().unwrap().1.is_none());
    }

    #[test]
    fn corruption_keys() {
        let mut p = Params::default();
        p.set_pair("fraction=0.3").unwrap();
        p.set_pair("pattern=pixels").unwrap();
        let spec = p.corruption().unwrap();
        assert_eq!(spec.target_fraction, 0.3);
        assert_eq!(spec.pattern, CorruptionPattern::RandomPixels);
        p.set_pair("fraction=1.5").unwrap();
        assert!(p.corruption().is_err());
    }
}
