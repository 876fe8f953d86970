//! Code graph construction: the CONTAINS spine from a parsed source tree,
//! then reference edges from symbol resolution, then removal of child text
//! from parent nodes.

pub mod dedup;
mod hierarchy;
pub mod python;
mod resolve;
pub mod syntax;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Component, Path, PathBuf};

use serde::Serialize;
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::graph::CodeGraph;

pub use dedup::{dedup_parent_text, expand_node, parse_placeholder, placeholder_line};
pub use hierarchy::{build_hierarchy, Hierarchy};
pub use python::PythonSyntax;
pub use resolve::resolve_references;
pub use syntax::SyntaxProvider;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    /// Repository-relative path with `/` separators.
    pub path: String,
    pub bytes: Vec<u8>,
}

/// The files of a repository, in path order.
#[derive(Debug, Clone)]
pub struct SourceTree {
    pub root_dir: PathBuf,
    name: String,
    files: Vec<SourceFile>,
    dirs: BTreeSet<String>,
}

fn skipped_entry(name: &str) -> bool {
    name.starts_with('.') || name == "__pycache__"
}

impl SourceTree {
    /// Reads a directory recursively. Hidden entries and `__pycache__` are
    /// skipped; symlinks are not followed.
    pub fn from_dir(root: &Path) -> Result<Self> {
        let meta = fs::metadata(root).map_err(|e| Error::io(root, e))?;
        if !meta.is_dir() {
            return Err(Error::io(
                root,
                std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
            ));
        }
        let mut files = Vec::new();
        let mut dirs = BTreeSet::new();
        let walker = WalkDir::new(root)
            .follow_links(false)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| e.depth() == 0 || !skipped_entry(&e.file_name().to_string_lossy()));
        for entry in walker {
            let entry = entry.map_err(|e| {
                let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| root.to_path_buf());
                Error::io(path, e.into())
            })?;
            if entry.depth() == 0 {
                continue;
            }
            let rel = relative(root, entry.path())?;
            if entry.file_type().is_dir() {
                dirs.insert(rel);
            } else if entry.file_type().is_file() {
                let bytes = fs::read(entry.path()).map_err(|e| Error::io(entry.path(), e))?;
                files.push(SourceFile { path: rel, bytes });
            }
        }
        let name = root
            .canonicalize()
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "repo".into());
        let mut tree = SourceTree {
            root_dir: root.to_path_buf(),
            name,
            files,
            dirs,
        };
        tree.normalize();
        Ok(tree)
    }

    /// Builds a tree from in-memory files. Paths must be relative, unique
    /// and must not escape the root.
    pub fn from_files<P, B>(name: &str, files: impl IntoIterator<Item = (P, B)>) -> Result<Self>
    where
        P: Into<String>,
        B: Into<Vec<u8>>,
    {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (path, bytes) in files {
            let path: String = path.into();
            let clean = Path::new(&path)
                .components()
                .all(|c| matches!(c, Component::Normal(_)));
            if path.is_empty() || !clean || path.contains('\\') {
                return Err(Error::contract(format!("invalid source path `{path}`")));
            }
            if !seen.insert(path.clone()) {
                return Err(Error::contract(format!("duplicate source path `{path}`")));
            }
            out.push(SourceFile {
                path,
                bytes: bytes.into(),
            });
        }
        let mut tree = SourceTree {
            root_dir: PathBuf::from(name),
            name: name.to_string(),
            files: out,
            dirs: BTreeSet::new(),
        };
        tree.normalize();
        Ok(tree)
    }

    fn normalize(&mut self) {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        for f in &self.files {
            let mut dir = f.path.as_str();
            while let Some((parent, _)) = dir.rsplit_once('/') {
                self.dirs.insert(parent.to_string());
                dir = parent;
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn files(&self) -> &[SourceFile] {
        &self.files
    }

    /// Every directory below the root, in path order.
    pub fn dirs(&self) -> &BTreeSet<String> {
        &self.dirs
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty() && self.dirs.is_empty()
    }
}

fn relative(root: &Path, path: &Path) -> Result<String> {
    let rel = path.strip_prefix(root).map_err(|_| {
        Error::contract(format!("{} escapes {}", path.display(), root.display()))
    })?;
    let parts: Vec<String> = rel
        .components()
        .map(|c| match c {
            Component::Normal(s) => Ok(s.to_string_lossy().into_owned()),
            _ => Err(Error::contract(format!("unexpected path component in {}", rel.display()))),
        })
        .collect::<Result<_>>()?;
    Ok(parts.join("/"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarningKind {
    ParseError,
    NonUtf8,
    SkippedItem,
    UnresolvedImport,
    UnresolvedBase,
    UnresolvedCall,
    UnresolvedReceiver,
    UnresolvedMethod,
}

impl WarningKind {
    pub fn label(self) -> &'static str {
        match self {
            WarningKind::ParseError => "parse-error",
            WarningKind::NonUtf8 => "non-utf8",
            WarningKind::SkippedItem => "skipped-item",
            WarningKind::UnresolvedImport => "unresolved-import",
            WarningKind::UnresolvedBase => "unresolved-base",
            WarningKind::UnresolvedCall => "unresolved-call",
            WarningKind::UnresolvedReceiver => "unresolved-receiver",
            WarningKind::UnresolvedMethod => "unresolved-method",
        }
    }
}

/// A non-fatal build diagnostic, rendered as `path:line kind message`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Warning {
    pub path: String,
    pub line: u32,
    pub kind: WarningKind,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{} {} {}", self.path, self.line, self.kind.label(), self.message)
    }
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub graph: CodeGraph,
    pub warnings: Vec<Warning>,
}

/// Full pipeline: hierarchy, reference resolution, parent-text dedup.
pub fn build_graph(tree: &SourceTree, provider: &dyn SyntaxProvider) -> Result<BuildOutput> {
    let hierarchy = build_hierarchy(tree, provider)?;
    let (graph, mut warnings) = resolve_references(&hierarchy);
    let graph = dedup_parent_text(&graph)?;
    warnings.extend(hierarchy.warnings);
    warnings.sort();
    warnings.dedup();
    Ok(BuildOutput { graph, warnings })
}

/// Builds a Python repository graph straight from a directory.
pub fn build_from_dir(root: &Path) -> Result<BuildOutput> {
    let tree = SourceTree::from_dir(root)?;
    build_graph(&tree, &PythonSyntax)
}
