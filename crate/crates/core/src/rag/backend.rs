use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Completion and embedding service used by the rewriter, the semantic
/// anchor search and the reranker.
pub trait ModelBackend: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String>;

    /// Embedding of `text`; the length is fixed per backend.
    fn embed(&self, text: &str) -> Result<Vec<f64>>;
}

pub const TRIGRAM_DIM: usize = 256;

/// Offline embedder: hashed character-trigram counts, L2-normalized.
#[derive(Debug, Clone, Copy, Default)]
pub struct HashedTrigramEmbedder;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl HashedTrigramEmbedder {
    pub fn embed(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; TRIGRAM_DIM];
        let chars: Vec<char> = text.chars().collect();
        let mut buf = [0u8; 12];
        for w in chars.windows(3) {
            let mut len = 0;
            for c in w {
                len += c.encode_utf8(&mut buf[len..]).len();
            }
            v[(fnv1a(&buf[..len]) % TRIGRAM_DIM as u64) as usize] += 1.0;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return 0.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

pub const TOKEN_ENV: &str = "CGM_BACKEND_TOKEN";

/// JSON-over-HTTP backend: `POST {base}/complete {prompt} -> {text}` and
/// `POST {base}/embed {text} -> {vector}`. Failed requests are retried
/// once.
#[derive(Debug, Clone)]
pub struct HttpBackend {
    base: String,
    token: Option<String>,
    client: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct CompleteRequest<'a> {
    prompt: &'a str,
}

#[derive(Deserialize)]
struct CompleteResponse {
    text: String,
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    text: &'a str,
}

#[derive(Deserialize)]
struct EmbedResponse {
    vector: Vec<f64>,
}

impl HttpBackend {
    pub fn new(base_url: &str, timeout: Duration) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| Error::Backend(e.to_string()))?;
        Ok(HttpBackend {
            base: base_url.trim_end_matches('/').to_string(),
            token: std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty()),
            client,
        })
    }

    fn post<Req: Serialize, Resp: for<'de> Deserialize<'de>>(&self, route: &str, body: &Req) -> Result<Resp> {
        let url = format!("{}/{route}", self.base);
        let mut last = String::new();
        for _ in 0..2 {
            let mut req = self.client.post(&url).json(body);
            if let Some(t) = &self.token {
                req = req.bearer_auth(t);
            }
            match req.send().and_then(|r| r.error_for_status()) {
                Ok(resp) => match resp.json::<Resp>() {
                    Ok(v) => return Ok(v),
                    Err(e) => last = e.to_string(),
                },
                Err(e) => last = e.to_string(),
            }
        }
        Err(Error::Backend(format!("{url}: {last}")))
    }
}

impl ModelBackend for HttpBackend {
    fn complete(&self, prompt: &str) -> Result<String> {
        self.post::<_, CompleteResponse>("complete", &CompleteRequest { prompt })
            .map(|r| r.text)
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>> {
        let v = self.post::<_, EmbedResponse>("embed", &EmbedRequest { text })?.vector;
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Backend("embedding is empty or not finite".into()));
        }
        Ok(v)
    }
}
