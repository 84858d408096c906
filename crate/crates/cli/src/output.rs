//! Output metadata and artifact writing.

use serde::Serialize;
use sha2::{Digest, Sha256};

use specsplit_core::{Result, Tolerances};

/// Header attached to every artifact: tool version, seed, tolerance block
/// and a digest of the input it was computed from.
#[derive(Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub input_digest: Option<String>,
}

impl Meta {
    pub fn new(seed: u64, tolerances: &Tolerances, input: Option<&[u8]>) -> Self {
        Meta {
            tool: "specsplit",
            version: env!("CARGO_PKG_VERSION"),
            seed,
            tolerances: tolerances.clone(),
            input_digest: input.map(|bytes| {
                let mut hasher = Sha256::new();
                hasher.update(bytes);
                format!("sha256:{}", hex::encode(hasher.finalize()))
            }),
        }
    }

    /// The same header as comment lines for line-oriented formats.
    pub fn comment_lines(&self, prefix: &str) -> String {
        let digest = self.input_digest.as_deref().unwrap_or("-");
        format!(
            "{prefix} tool=specsplit version={} seed={} input={}\n{prefix} tolerances={}\n",
            self.version,
            self.seed,
            digest,
            serde_json::to_string(&self.tolerances).expect("serializable"),
        )
    }
}

/// JSON artifact with the metadata header embedded.
pub fn render_json<T: Serialize>(meta: &Meta, payload: &T) -> String {
    #[derive(Serialize)]
    struct Artifact<'a, T> {
        meta: &'a Meta,
        #[serde(flatten)]
        payload: &'a T,
    }
    serde_json::to_string_pretty(&Artifact { meta, payload }).expect("serializable")
}

pub fn emit(target: Option<&std::path::Path>, text: &str) -> Result<()> {
    match target {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
