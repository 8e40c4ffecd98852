//! Object-color annotation through a pluggable annotator.
//!
//! Annotators return free-form color words; [`canonical_color`] folds them
//! onto a fixed palette so that retrieval compares like with like.

use std::collections::HashMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::DemoRecord;

pub const ENV_ANNOTATOR_URL: &str = "DVC_ANNOTATOR_URL";
pub const ENV_ANNOTATOR_TIMEOUT_MS: &str = "DVC_ANNOTATOR_TIMEOUT_MS";
pub const ENV_ANNOTATOR_RETRIES: &str = "DVC_ANNOTATOR_RETRIES";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColorError {
    #[error("color annotator unavailable for `{id}`: {reason}")]
    AnnotatorUnavailable { id: String, reason: String },
    #[error("unrecognized color `{0}`")]
    UnrecognizedColor(String),
}

/// Request body sent to an external annotator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorRequest {
    pub id: String,
    /// Reference to the first frame of the demonstration.
    pub image_ref: String,
    pub object: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorResponse {
    pub color: String,
}

/// Source of raw (uncanonicalized) color words. Implementations must be
/// safe to call from several threads.
pub trait ColorAnnotator: Send + Sync {
    fn raw_color(&self, request: &ColorRequest) -> Result<String, ColorError>;
}

/// Offline lookup keyed by demo id.
#[derive(Debug, Clone, Default)]
pub struct OfflineColorTable {
    colors: HashMap<String, String>,
}

impl OfflineColorTable {
    pub fn new(colors: HashMap<String, String>) -> Self {
        OfflineColorTable { colors }
    }

    /// JSON object `{"<demo id>": "<color>", ...}`.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        Ok(OfflineColorTable {
            colors: serde_json::from_str(text)?,
        })
    }
}

impl ColorAnnotator for OfflineColorTable {
    fn raw_color(&self, request: &ColorRequest) -> Result<String, ColorError> {
        self.colors
            .get(&request.id)
            .cloned()
            .ok_or_else(|| ColorError::AnnotatorUnavailable {
                id: request.id.clone(),
                reason: "id not in offline table".into(),
            })
    }
}

/// Client for an external annotator: `POST {id, image_ref, object}` returning `{color}`.
#[derive(Debug)]
pub struct HttpColorAnnotator {
    url: String,
    retries: u32,
    agent: ureq::Agent,
}

impl HttpColorAnnotator {
    pub fn new(url: impl Into<String>, timeout: Duration, retries: u32) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .new_agent();
        HttpColorAnnotator {
            url: url.into(),
            retries,
            agent,
        }
    }

    /// Configured from `DVC_ANNOTATOR_URL`, `DVC_ANNOTATOR_TIMEOUT_MS`
    /// (default 10000) and `DVC_ANNOTATOR_RETRIES` (default 2). `None` when
    /// no URL is set.
    pub fn from_env() -> Option<Self> {
        let url = std::env::var(ENV_ANNOTATOR_URL).ok().filter(|u| !u.is_empty())?;
        let timeout_ms = std::env::var(ENV_ANNOTATOR_TIMEOUT_MS)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(10_000);
        let retries = std::env::var(ENV_ANNOTATOR_RETRIES)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(2);
        Some(HttpColorAnnotator::new(url, Duration::from_millis(timeout_ms), retries))
    }

    fn call(&self, request: &ColorRequest) -> Result<String, String> {
        let mut resp = self.agent.post(&self.url).send_json(request).map_err(|e| e.to_string())?;
        let body: ColorResponse = resp.body_mut().read_json().map_err(|e| e.to_string())?;
        Ok(body.color)
    }
}

impl ColorAnnotator for HttpColorAnnotator {
    fn raw_color(&self, request: &ColorRequest) -> Result<String, ColorError> {
        let mut last = String::new();
        for _ in 0..=self.retries {
            match self.call(request) {
                Ok(c) => return Ok(c),
                Err(e) => last = e,
            }
        }
        Err(ColorError::AnnotatorUnavailable {
            id: request.id.clone(),
            reason: last,
        })
    }
}

/// Palette words and the synonyms folded onto them.
const PALETTE: &[(&str, &[&str])] = &[
    ("red", &["crimson", "scarlet", "maroon", "burgundy", "ruby", "cherry", "vermilion", "reddish"]),
    ("orange", &["tangerine", "amber", "rust", "coral", "peach", "orangish"]),
    ("yellow", &["gold", "golden", "lemon", "mustard", "yellowish", "blond"]),
    ("green", &["lime", "olive", "emerald", "mint", "teal", "greenish", "jade"]),
    ("blue", &["navy", "azure", "cyan", "turquoise", "cobalt", "sky", "bluish", "indigo"]),
    ("purple", &["violet", "lavender", "magenta", "lilac", "plum", "mauve"]),
    ("pink", &["rose", "fuchsia", "salmon", "pinkish"]),
    ("brown", &["tan", "beige", "chocolate", "wooden", "wood", "bronze", "khaki", "brownish", "copper"]),
    ("black", &["dark", "ebony", "charcoal"]),
    ("white", &["ivory", "cream", "offwhite", "off-white", "pearl"]),
    ("gray", &["grey", "silver", "metallic", "steel", "slate", "ash"]),
    ("transparent", &["clear", "translucent"]),
];

/// Lowercase, strip punctuation, and fold synonyms onto the palette.
pub fn canonical_color(raw: &str) -> Result<String, ColorError> {
    let word = raw
        .trim()
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase();
    for (canon, synonyms) in PALETTE {
        if word == *canon || synonyms.contains(&word.as_str()) {
            return Ok(canon.to_string());
        }
    }
    Err(ColorError::UnrecognizedColor(raw.to_string()))
}

pub fn annotate_color(record: &DemoRecord, annotator: &dyn ColorAnnotator) -> Result<String, ColorError> {
    let request = ColorRequest {
        id: record.id.clone(),
        image_ref: format!("{}/frame/0", record.id),
        object: record.target_object().unwrap_or("object").to_string(),
    };
    canonical_color(&annotator.raw_color(&request)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    fn record(id: &str) -> DemoRecord {
        serde_json::from_str(&format!(
            r#"{{"id":"{id}","lab":"l","instructions":[],"camera_extrinsics":{{"pos":[1,0,1],"quat":[1,0,0,0]}},"steps":[{{"t":0,"ee_pos":[0,0,0],"ee_quat":[1,0,0,0],"gripper":0}}]}}"#
        ))
        .unwrap()
    }

    #[test]
    fn offline_lookup() {
        let table = OfflineColorTable::from_json(r#"{"d17":"red","d18":"Crimson"}"#).unwrap();
        assert_eq!(annotate_color(&record("d17"), &table).unwrap(), "red");
        assert_eq!(annotate_color(&record("d18"), &table).unwrap(), "red");
        assert!(matches!(
            annotate_color(&record("d99"), &table),
            Err(ColorError::AnnotatorUnavailable { .. })
        ));
    }

    #[test]
    fn folding() {
        assert_eq!(canonical_color("Crimson").unwrap(), "red");
        assert_eq!(canonical_color(" Grey.").unwrap(), "gray");
        assert!(matches!(canonical_color("sparkly"), Err(ColorError::UnrecognizedColor(_))));
    }

    #[test]
    fn http_round_trip() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let server = std::thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
            }
            let mut body = vec![0; len];
            reader.read_exact(&mut body).unwrap();
            let req: ColorRequest = serde_json::from_slice(&body).unwrap();
            let reply = format!(r#"{{"color":"{}"}}"#, if req.object == "mug" { "Scarlet" } else { "blue" });
            let mut out = stream;
            write!(
                out,
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                reply.len(),
                reply
            )
            .unwrap();
            req
        });
        let ann = HttpColorAnnotator::new(format!("http://{addr}/color"), Duration::from_secs(5), 0);
        let mut rec = record("d1");
        rec.annotations = Some(crate::metadata::Annotations {
            target_object: Some("mug".into()),
            ..Default::default()
        });
        assert_eq!(annotate_color(&rec, &ann).unwrap(), "red");
        let req = server.join().unwrap();
        assert_eq!(req.id, "d1");
        assert_eq!(req.image_ref, "d1/frame/0");
    }

    #[test]
    fn http_unreachable_is_unavailable() {
        // bind then drop to get a port nobody listens on
        let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let ann = HttpColorAnnotator::new(format!("http://127.0.0.1:{port}/"), Duration::from_millis(500), 1);
        assert!(matches!(
            annotate_color(&record("x"), &ann),
            Err(ColorError::AnnotatorUnavailable { .. })
        ));
    }
}
