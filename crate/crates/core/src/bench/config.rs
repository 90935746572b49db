//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! n = 200
//! m = 240, 300, 600          # or: m_range = 240:600:60 (inclusive)
//! trials = 50
//! base_seed = 1
//! success_threshold = 0.01
//! record_every = 10
//! steps = 1500               # default for every method
//! threads = 0                # 0 = all cores
//! method = tanhwfl/tanh      # rule/init; repeat for more methods
//! method = fast: rtanhwfl/tanh
//! fast.step_size = 0.3       # per-method override, addressed by name
//! ```
//!
//! Rules: `tanhwfl`, `tanhwfq`, `rtanhwfl`, `rtanhwf`, `twf`.
//! Inits: `tanh`, `truncated`, `oracle` (starts at the true signal; for tests).
//! Overridable parameters: `step_size`, `momentum`, `steps`, `power_iters`,
//! `alpha`, `beta` (tanh init), `alpha_y` (truncated init), `T`, `w_f`, `w_g`,
//! `b` (reweighted rules), `alpha_z_lb`, `alpha_z_ub`, `alpha_h` (TWF).

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::flows::FlowRule;
use crate::init::InitVariant;
use crate::optimizer::SolveOptions;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitChoice {
    Spectral { variant: InitVariant, power_iters: usize },
    /// Start at the true signal.
    Oracle,
}

impl InitChoice {
    pub fn from_name(name: &str) -> Option<Self> {
        let variant = match name.to_ascii_lowercase().as_str() {
            "tanh" => InitVariant::tanh(),
            "truncated" => InitVariant::truncated(),
            "oracle" => return Some(InitChoice::Oracle),
            _ => return None,
        };
        Some(InitChoice::Spectral { variant, power_iters: 100 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSpec {
    pub name: String,
    pub rule: FlowRule,
    pub init: InitChoice,
    pub opts: SolveOptions,
}

impl MethodSpec {
    /// Builds `rule/init` with the default solver settings for the rule.
    pub fn parse(name: &str, combo: &str) -> Result<Self> {
        let (r, i) = combo
            .split_once('/')
            .ok_or_else(|| invalid(format!("method `{combo}` must look like rule/init")))?;
        let rule = FlowRule::from_name(r.trim()).ok_or_else(|| invalid(format!("unknown rule `{r}`")))?;
        let init = InitChoice::from_name(i.trim()).ok_or_else(|| invalid(format!("unknown init `{i}`")))?;
        Ok(Self { name: name.to_string(), rule, init, opts: SolveOptions::for_rule(&rule) })
    }

    fn set(&mut self, key: &str, v: f64) -> Result<()> {
        let not_applicable = || invalid(format!("parameter `{key}` does not apply to method `{}`", self.name));
        let count = |v: f64| {
            if v >= 1.0 && v.fract() == 0.0 && v < 1e12 {
                Ok(v as usize)
            } else {
                Err(invalid(format!("`{key}` must be a positive integer, got {v}")))
            }
        };
        match key {
            "step_size" => self.opts.step_size = v,
            "momentum" => self.opts.momentum = v,
            "steps" => self.opts.steps = count(v)?,
            "power_iters" | "alpha" | "beta" | "alpha_y" => match &mut self.init {
                InitChoice::Oracle => return Err(not_applicable()),
                InitChoice::Spectral { variant, power_iters } => match (key, variant) {
                    ("power_iters", _) => *power_iters = count(v)?,
                    ("alpha", InitVariant::TanhSpectral { alpha, .. }) => *alpha = v,
                    ("beta", InitVariant::TanhSpectral { beta, .. }) => *beta = v,
                    ("alpha_y", InitVariant::TruncatedSpectral { alpha_y }) => *alpha_y = v,
                    _ => return Err(not_applicable()),
                },
            },
            "T" | "w_f" | "w_g" | "b" => match &mut self.rule {
                FlowRule::RTanhWFL(p) | FlowRule::RTanhWF(p) => match key {
                    "T" => p.t_decay = v,
                    "w_f" => p.w_f = v,
                    "w_g" => p.w_g = v,
                    _ => p.b = v,
                },
                _ => return Err(not_applicable()),
            },
            "alpha_z_lb" | "alpha_z_ub" | "alpha_h" => match &mut self.rule {
                FlowRule::Twf(p) => match key {
                    "alpha_z_lb" => p.alpha_z_lb = v,
                    "alpha_z_ub" => p.alpha_z_ub = v,
                    _ => p.alpha_h = v,
                },
                _ => return Err(not_applicable()),
            },
            _ => return Err(invalid(format!("unknown method parameter `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.rule.validate()?;
        self.opts.validate()?;
        if let InitChoice::Spectral { variant, power_iters } = self.init {
            crate::init::InitMethod { variant, power_iters, seed: 0 }.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub n: usize,
    pub m_list: Vec<usize>,
    pub methods: Vec<MethodSpec>,
    pub trials: usize,
    pub base_seed: u64,
    pub success_threshold: f64,
    pub record_every: usize,
    pub signal_norm: f64,
    /// Worker threads (0 = library default). Not part of the hash.
    #[serde(skip)]
    pub threads: usize,
}

fn parse_num<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse { line, msg: format!("bad value for `{key}`: `{v}`") })
}

impl BenchConfig {
    /// Desk-scale sweep, `n = 200`, 50 trials.
    pub fn desk() -> Self {
        Self::parse(include_str!("../../../../configs/desk.cfg")).expect("bundled desk profile parses")
    }

    /// Full-scale sweep, `n = 1000`, `m = 1500..=3000`, 400 trials.
    pub fn full() -> Self {
        Self::parse(include_str!("../../../../configs/full.cfg")).expect("bundled full profile parses")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = BenchConfig {
            n: 0,
            m_list: vec![],
            methods: vec![],
            trials: 1,
            base_seed: 0,
            success_threshold: 0.01,
            record_every: 10,
            signal_norm: 1.0,
            threads: 0,
        };
        let mut steps: Option<usize> = None;
        let mut overrides = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Parse { line, msg: format!("expected `key = value`, got `{body}`") })?;
            match key {
                "n" => cfg.n = parse_num(value, line, key)?,
                "m" => {
                    cfg.m_list = value
                        .split(',')
                        .map(|s| parse_num(s.trim(), line, key))
                        .collect::<Result<Vec<usize>>>()?
                }
                "m_range" => {
                    let parts: Vec<usize> = value
                        .split(':')
                        .map(|s| parse_num(s.trim(), line, key))
                        .collect::<Result<_>>()?;
                    let [lo, hi, step] = parts[..] else {
                        return Err(Error::Parse { line, msg: "m_range must be start:end:step".into() });
                    };
                    if step == 0 || lo > hi {
                        return Err(Error::Parse { line, msg: "m_range needs step > 0 and start <= end".into() });
                    }
                    cfg.m_list = (lo..=hi).step_by(step).collect();
                }
                "trials" => cfg.trials = parse_num(value, line, key)?,
                "base_seed" => cfg.base_seed = parse_num(value, line, key)?,
                "success_threshold" => cfg.success_threshold = parse_num(value, line, key)?,
                "record_every" => cfg.record_every = parse_num(value, line, key)?,
                "signal_norm" => cfg.signal_norm = parse_num(value, line, key)?,
                "threads" => cfg.threads = parse_num(value, line, key)?,
                "steps" => steps = Some(parse_num(value, line, key)?),
                "method" => {
                    let (name, combo) = match value.split_once(':') {
                        Some((label, combo)) => (label.trim(), combo.trim()),
                        None => (value, value),
                    };
                    if cfg.methods.iter().any(|m| m.name == name) {
                        return Err(Error::Parse { line, msg: format!("duplicate method name `{name}`") });
                    }
                    let spec = MethodSpec::parse(name, combo).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
                    cfg.methods.push(spec);
                }
                _ => match key.rsplit_once('.') {
                    Some((method, param)) => {
                        let v: f64 = parse_num(value, line, key)?;
                        overrides.push((line, method.trim().to_string(), param.trim().to_string(), v));
                    }
                    None => return Err(Error::Parse { line, msg: format!("unknown key `{key}`") }),
                },
            }
        }
        for m in &mut cfg.methods {
            m.opts.success_threshold = cfg.success_threshold;
            m.opts.record_every = cfg.record_every;
            if let Some(s) = steps {
                m.opts.steps = s;
            }
        }
        for (line, method, param, v) in overrides {
            let spec = cfg
                .methods
                .iter_mut()
                .find(|m| m.name == method)
                .ok_or_else(|| Error::Parse { line, msg: format!("override for undeclared method `{method}`") })?;
            spec.set(&param, v).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("config needs n >= 1"));
        }
        if self.m_list.is_empty() || self.m_list.contains(&0) {
            return Err(invalid("config needs a nonempty list of positive m values"));
        }
        if self.trials == 0 {
            return Err(invalid("config needs trials >= 1"));
        }
        if self.methods.is_empty() {
            return Err(invalid("config needs at least one method"));
        }
        if !(self.signal_norm > 0.0) {
            return Err(invalid("signal_norm must be positive"));
        }
        self.methods.iter().try_for_each(MethodSpec::validate)
    }

    /// First 16 hex digits of the SHA-256 of the resolved configuration.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config is serializable");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
        n = 20
        m_range = 40:80:20   # inclusive
        trials = 3
        base_seed = 9
        steps = 50
        method = tanhwfl/tanh
        method = slow: rtanhwfl/truncated
        slow.step_size = 0.05
        slow.T = 600
        slow.alpha_y = 2.5
    ";

    #[test]
    fn parses_sample() {
        let c = BenchConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.m_list, vec![40, 60, 80]);
        assert_eq!(c.methods.len(), 2);
        assert_eq!(c.methods[0].name, "tanhwfl/tanh");
        assert_eq!(c.methods[0].opts.step_size, 0.02);
        let slow = &c.methods[1];
        assert_eq!(slow.opts.step_size, 0.05);
        assert_eq!(slow.opts.steps, 50);
        assert_eq!(slow.opts.record_every, 10);
        match slow.rule {
            FlowRule::RTanhWFL(p) => assert_eq!(p.t_decay, 600.0),
            _ => panic!(),
        }
        assert_eq!(
            slow.init,
            InitChoice::Spectral { variant: InitVariant::TruncatedSpectral { alpha_y: 2.5 }, power_iters: 100 }
        );
    }

    #[test]
    fn hash_tracks_content_not_threads() {
        let a = BenchConfig::parse(SAMPLE).unwrap();
        let mut b = a.clone();
        b.threads = 7;
        assert_eq!(a.config_hash(), b.config_hash());
        b.trials = 4;
        assert_ne!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash().len(), 16);
    }

    #[test]
    fn reports_errors_with_lines() {
        let bad = [
            ("n = 5\nm = 10\nfoo = 1\nmethod = twf/tanh", 3),
            ("n = 5\nm = ten\nmethod = twf/tanh", 2),
            ("n = 5\nm = 10\nmethod = wf/tanh", 3),
            ("n = 5\nm = 10\nmethod = twf/tanh\nx.step_size = 1", 4),
            ("n = 5\nm = 10\nmethod = twf/tanh\ntwf/tanh.T = 1", 4),
            ("n = 5\nm = 10\nmethod = twf/oracle\ntwf/oracle.alpha = 1", 4),
            ("n = 5\njunk line", 2),
        ];
        for (text, line) in bad {
            match BenchConfig::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(BenchConfig::parse("n = 5\nm = 10").is_err());
        assert!(BenchConfig::parse("n = 5\nm = 10\ntrials = 0\nmethod = twf/tanh").is_err());
    }

    #[test]
    fn bundled_profiles() {
        let d = BenchConfig::desk();
        assert_eq!((d.n, d.trials), (200, 50));
        assert!(d.m_list.contains(&240) && d.m_list.contains(&600));
        let p = BenchConfig::full();
        assert_eq!((p.n, p.trials), (1000, 400));
        assert_eq!(p.m_list, (1500..=3000).step_by(100).collect::<Vec<_>>());
        for m in &p.methods {
            if m.rule.uses_iteration() {
                assert_eq!(m.opts.step_size, 0.2);
            } else {
                assert_eq!(m.opts.step_size, 0.02);
            }
            assert_eq!(m.opts.steps, 1500);
        }
    }
}
