use std::fs;
use std::path::{Path, PathBuf};

use crate::automorphy::PeriodMatrix;
use crate::error::{Error, Result};
use crate::padic::{Padic, PadicContext};

/// Period matrix and the pinned polarization entries of one group at one `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct CachedPeriods {
    pub q: PeriodMatrix,
    pub diag: Vec<Padic>,
    pub upper: Vec<Padic>,
}

/// Content-addressed store under `<dir>/cache`, keyed by group hash and `L`.
#[derive(Debug, Clone)]
pub struct PeriodCache {
    dir: PathBuf,
}

fn io(e: std::io::Error, path: &Path) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

impl PeriodCache {
    pub fn new(out: &Path) -> Self {
        PeriodCache {
            dir: out.join("cache"),
        }
    }

    pub fn path(&self, key: &str, trunc: usize) -> PathBuf {
        self.dir.join(format!("periods-{key}-L{trunc}.txt"))
    }

    pub fn load(
        &self,
        key: &str,
        trunc: usize,
        ctx: PadicContext,
    ) -> Result<Option<CachedPeriods>> {
        let path = self.path(key, trunc);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io(e, &path)),
        };
        decode(&text, ctx).map(Some)
    }

    /// Writes to a temporary file and renames it into place.
    pub fn store(&self, key: &str, trunc: usize, data: &CachedPeriods) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| io(e, &self.dir))?;
        let path = self.path(key, trunc);
        let tmp = self.dir.join(format!(
            ".periods-{key}-L{trunc}.{}.tmp",
            std::process::id()
        ));
        fs::write(&tmp, encode(data)).map_err(|e| io(e, &tmp))?;
        fs::rename(&tmp, &path).map_err(|e| io(e, &path))
    }
}

fn encode(d: &CachedPeriods) -> String {
    let g = d.q.genus();
    let mut out = format!("genus = {g}\ntail = {}\n", d.q.tail);
    for i in 0..g {
        for j in 0..g {
            out.push_str(&format!("q {i} {j} = {}\n", d.q.get(i, j)));
        }
    }
    for (i, x) in d.diag.iter().enumerate() {
        out.push_str(&format!("diag {i} = {x}\n"));
    }
    for (i, x) in d.upper.iter().enumerate() {
        out.push_str(&format!("upper {i} = {x}\n"));
    }
    out
}

fn decode(text: &str, ctx: PadicContext) -> Result<CachedPeriods> {
    let bad = |why: &str| Error::Parse(format!("cache file: {why}"));
    let mut genus = None;
    let mut tail = None;
    let mut q: Vec<Vec<Option<Padic>>> = Vec::new();
    let mut diag = Vec::new();
    let mut upper = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (key, value) = line.split_once(" = ").ok_or_else(|| bad("missing ' = '"))?;
        let parts: Vec<&str> = key.split_whitespace().collect();
        match parts[..] {
            ["genus"] => {
                let g: usize = value.parse().map_err(|_| bad("genus"))?;
                q = vec![vec![None; g]; g];
                genus = Some(g);
            }
            ["tail"] => tail = Some(value.parse::<i64>().map_err(|_| bad("tail"))?),
            ["q", i, j] => {
                let i: usize = i.parse().map_err(|_| bad("index"))?;
                let j: usize = j.parse().map_err(|_| bad("index"))?;
                let slot = q
                    .get_mut(i)
                    .and_then(|r| r.get_mut(j))
                    .ok_or_else(|| bad("index out of range"))?;
                *slot = Some(Padic::parse(ctx, value)?);
            }
            ["diag", _] => diag.push(Padic::parse(ctx, value)?),
            ["upper", _] => upper.push(Padic::parse(ctx, value)?),
            _ => return Err(bad("unknown key")),
        }
    }
    let g = genus.ok_or_else(|| bad("no genus"))?;
    let entries = q
        .into_iter()
        .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad("missing period entry"))?;
    if diag.len() != g || upper.len() != g * (g - 1) / 2 {
        return Err(bad("wrong number of polarization entries"));
    }
    Ok(CachedPeriods {
        q: PeriodMatrix {
            entries,
            tail: tail.ok_or_else(|| bad("no tail"))?,
        },
        diag,
        upper,
    })
}
