use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use phasegroup::sample::format_value;
use phasegroup::LagrangianSample;
use serde::Serialize;

use crate::error::CliError;

/// Run parameters recorded in the first line of every CSV.
#[derive(Clone, Debug)]
pub struct RunStamp {
    pub seed: u64,
    pub steps: usize,
    pub tolerance: f64,
}

impl RunStamp {
    pub fn comment(&self) -> String {
        format!("# seed={} tolerance={:e} steps={}", self.seed, self.tolerance, self.steps)
    }
}

/// Files written by one run, in creation order, plus summary lines for stdout.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl Artifacts {
    /// The directory is created on the first write.
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            ..Self::default()
        }
    }

    pub fn note(&mut self, line: String) {
        self.notes.push(line);
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        let f = File::create(&path)?;
        self.files.push(path);
        Ok(BufWriter::new(f))
    }

    pub fn csv(&mut self, name: &str, stamp: &RunStamp, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = self.create(name)?;
        writeln!(w, "{}", stamp.comment())?;
        writeln!(w, "{}", header.join(","))?;
        for r in rows {
            writeln!(w, "{}", r.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn sample(&mut self, name: &str, stamp: &RunStamp, sample: &LagrangianSample) -> Result<(), CliError> {
        let mut w = self.create(name)?;
        writeln!(w, "{}", stamp.comment())?;
        sample.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<(), CliError> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::other)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

pub fn num(v: f64) -> String {
    format_value(v)
}

pub fn nums(vs: &[f64]) -> Vec<String> {
    vs.iter().map(|&v| num(v)).collect()
}

pub fn names(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|k| format!("{prefix}{k}")).collect()
}
