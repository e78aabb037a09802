// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Output plumbing: the writer is opened before any computation so an
//! unwritable path fails fast, and all floats are printed at 17 significant
//! digits, which parses back to the identical double.

use crate::CliError;
use std::io::Write;
use std::path::Path;

pub enum Sink {
    File(std::io::BufWriter<std::fs::File>),
    Stdout(std::io::Stdout),
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                let file = std::fs::File::create(p).map_err(|e| {
                    CliError::Io(format!("cannot write output {}: {e}", p.display()))
                })?;
                Ok(Sink::File(std::io::BufWriter::new(file)))
            }
            None => Ok(Sink::Stdout(std::io::stdout())),
        }
    }

    pub fn writer(&mut self) -> &mut dyn Write {
        match self {
            Sink::File(w) => w,
            Sink::Stdout(w) => w,
        }
    }

    pub fn finish(self) -> Result<(), CliError> {
        if let Sink::File(mut w) = self {
            w.flush()?;
        }
        Ok(())
    }
}

/// 17-significant-digit float field; round-trips bit-exactly.
pub fn f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Optional field: empty when missing.
pub fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

pub fn write_json_pretty<T: serde::Serialize>(
    w: &mut dyn Write,
    value: &T,
) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, value)
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    writeln!(w)?;
    Ok(())
}
