//! Collected artifacts, written only after the whole command succeeded.

use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, String)>,
    /// Printed to stdout when no output directory is given.
    primary: Option<String>,
    /// Printed to stdout when an output directory is given.
    summary: Option<String>,
}

impl Artifacts {
    pub fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    /// Like `file`, and also the stdout payload when there is no `--out`.
    pub fn primary(&mut self, name: &str, contents: String) {
        self.primary = Some(contents.clone());
        self.file(name, contents);
    }

    pub fn summary(&mut self, text: String) {
        self.summary = Some(text);
    }

    /// Writes every file through a temporary sibling and a rename.
    pub fn commit(&self, out: Option<&Path>) -> std::io::Result<()> {
        let Some(dir) = out else {
            if let Some(p) = self.primary.as_ref().or(self.summary.as_ref()) {
                print_block(p);
            }
            return Ok(());
        };
        fs::create_dir_all(dir)?;
        for (name, contents) in &self.files {
            let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
            let mut f = fs::File::create(&tmp)?;
            f.write_all(contents.as_bytes())?;
            f.sync_all()?;
            fs::rename(&tmp, dir.join(name))?;
        }
        if let Some(s) = self.summary.as_ref().or(self.primary.as_ref()) {
            print_block(s);
        }
        Ok(())
    }
}

fn print_block(s: &str) {
    if s.ends_with('\n') {
        print!("{s}");
    } else {
        println!("{s}");
    }
}

pub fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable report");
    s.push('\n');
    s
}
