use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BACKEND_URL_ENV: &str = "CGM_BACKEND_URL";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub chunk_size: usize,
    pub recon_budget: usize,
    pub p_add: f64,
    pub p_omit: f64,
    pub rerank_k1: usize,
    pub rerank_k2: usize,
    pub top_k_semantic: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend_url: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            chunk_size: 512,
            recon_budget: 8000,
            p_add: 0.10,
            p_omit: 0.10,
            rerank_k1: 10,
            rerank_k2: 5,
            top_k_semantic: 5,
            backend_url: None,
        }
    }
}

/// A partial configuration; every layer (file, env, flags) fills some of it.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub chunk_size: Option<usize>,
    pub recon_budget: Option<usize>,
    pub p_add: Option<f64>,
    pub p_omit: Option<f64>,
    pub rerank_k1: Option<usize>,
    pub rerank_k2: Option<usize>,
    pub top_k_semantic: Option<usize>,
    pub backend_url: Option<String>,
}

impl Overrides {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Malformed(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn from_env() -> Self {
        Overrides {
            backend_url: std::env::var(BACKEND_URL_ENV).ok().filter(|s| !s.is_empty()),
            ..Default::default()
        }
    }
}

impl Config {
    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if let Some(v) = &o.$f {
                    self.$f = v.clone();
                }
            )*};
        }
        take!(chunk_size, recon_budget, p_add, p_omit, rerank_k1, rerank_k2, top_k_semantic);
        if o.backend_url.is_some() {
            self.backend_url = o.backend_url.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("chunk_size", self.chunk_size),
            ("recon_budget", self.recon_budget),
            ("rerank_k1", self.rerank_k1),
            ("rerank_k2", self.rerank_k2),
            ("top_k_semantic", self.top_k_semantic),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::contract(format!("{name} must be positive")));
            }
        }
        for (name, p) in [("p_add", self.p_add), ("p_omit", self.p_omit)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::contract(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        Ok(())
    }

    /// Defaults, then each layer in order.
    pub fn layered(layers: &[Overrides]) -> Result<Self> {
        let mut c = Config::default();
        for l in layers {
            c.apply(l);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
