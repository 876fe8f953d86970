//! Python outline extraction on top of tree-sitter.

use tree_sitter::{Node, Parser};

use super::syntax::{
    Binding, CallSite, Callee, Import, Item, ItemKind, ModuleOutline, NameRef, Param, Receiver,
    SyntaxError, SyntaxProvider,
};
use crate::graph::{LineRange, SubjectLanguage};

/// The bundled Python backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct PythonSyntax;

impl SyntaxProvider for PythonSyntax {
    fn language(&self) -> SubjectLanguage {
        SubjectLanguage::Python
    }

    fn handles(&self, path: &str) -> bool {
        path.ends_with(".py")
    }

    fn parse(&self, source: &str) -> Result<ModuleOutline, SyntaxError> {
        let mut parser = Parser::new();
        parser
            .set_language(&tree_sitter_python::LANGUAGE.into())
            .expect("bundled grammar matches the tree-sitter ABI");
        let tree = parser.parse(source, None).ok_or_else(|| SyntaxError {
            line: 0,
            message: "parser produced no tree".into(),
        })?;
        let root = tree.root_node();
        if root.has_error() {
            let bad = first_error(root).unwrap_or(root);
            return Err(SyntaxError {
                line: bad.start_position().row as u32 + 1,
                message: if bad.is_missing() {
                    format!("missing {}", bad.kind())
                } else {
                    "syntax error".into()
                },
            });
        }

        let mut walker = Walker {
            src: source.as_bytes(),
            imports: Vec::new(),
        };
        let mut scope = Scope::default();
        walker.walk_children(root, &mut scope);
        Ok(ModuleOutline {
            items: scope.items,
            imports: walker.imports,
            calls: scope.calls,
            bindings: scope.bindings,
        })
    }
}

fn first_error(node: Node) -> Option<Node> {
    if node.is_error() || node.is_missing() {
        return Some(node);
    }
    let mut cursor = node.walk();
    let children: Vec<Node> = node.children(&mut cursor).collect();
    children
        .into_iter()
        .filter(|c| c.has_error() || c.is_missing())
        .find_map(first_error)
}

#[derive(Default)]
struct Scope {
    items: Vec<Item>,
    calls: Vec<CallSite>,
    bindings: Vec<Binding>,
}

struct Walker<'s> {
    src: &'s [u8],
    imports: Vec<Import>,
}

fn line_of(node: Node) -> u32 {
    node.start_position().row as u32 + 1
}

fn line_range(node: Node) -> LineRange {
    let start = node.start_position();
    let end = node.end_position();
    let end_row = if end.column == 0 && end.row > start.row {
        end.row
    } else {
        end.row + 1
    };
    LineRange::new(start.row as u32 + 1, end_row as u32)
}

impl<'s> Walker<'s> {
    fn text(&self, node: Node) -> &'s str {
        node.utf8_text(self.src).unwrap_or("")
    }

    /// True when only whitespace precedes `node` on its first line. Items
    /// that share a line with earlier code are not split out of their
    /// parent, which keeps sibling line ranges disjoint.
    fn at_line_start(&self, node: Node) -> bool {
        let before = &self.src[..node.start_byte()];
        let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        before[line_start..]
            .iter()
            .all(|b| matches!(b, b' ' | b'\t' | b'\x0c'))
    }

    fn walk_children(&mut self, node: Node, scope: &mut Scope) {
        let mut cursor = node.walk();
        let children: Vec<Node> = node.named_children(&mut cursor).collect();
        for child in children {
            self.walk(child, scope);
        }
    }

    fn walk(&mut self, node: Node, scope: &mut Scope) {
        match node.kind() {
            "decorated_definition" => {
                let mut cursor = node.walk();
                let decorators: Vec<Node> = node
                    .named_children(&mut cursor)
                    .filter(|c| c.kind() == "decorator")
                    .collect();
                for d in decorators {
                    self.walk_children(d, scope);
                }
                if let Some(def) = node.child_by_field_name("definition") {
                    self.definition(def, node, scope);
                }
            }
            "class_definition" | "function_definition" => self.definition(node, node, scope),
            "expression_statement" => {
                self.assignment(node, scope);
                self.walk_children(node, scope);
            }
            "import_statement" => self.import(node),
            "import_from_statement" => self.import_from(node),
            "future_import_statement" => {}
            "call" => {
                self.call(node, scope);
                self.walk_children(node, scope);
            }
            _ => self.walk_children(node, scope),
        }
    }

    fn definition(&mut self, def: Node, outer: Node, scope: &mut Scope) {
        let is_class = def.kind() == "class_definition";
        let name = def
            .child_by_field_name("name")
            .map(|n| self.text(n).to_string())
            .unwrap_or_default();
        let kind = if is_class {
            ItemKind::Class
        } else {
            ItemKind::Function
        };
        let mut item = Item::new(kind, name, line_range(outer));

        if is_class {
            if let Some(supers) = def.child_by_field_name("superclasses") {
                let mut cursor = supers.walk();
                let args: Vec<Node> = supers.named_children(&mut cursor).collect();
                for arg in args {
                    if let Some(path) = self.dotted(arg) {
                        item.bases.push(NameRef {
                            path,
                            line: line_of(arg),
                        });
                    }
                }
                // calls in the base list run in the enclosing scope
                self.walk_children(supers, scope);
            }
        } else if let Some(params) = def.child_by_field_name("parameters") {
            item.params = self.params(params);
            self.walk_children(params, scope);
        }

        let mut inner = Scope::default();
        if let Some(body) = def.child_by_field_name("body") {
            self.walk_children(body, &mut inner);
        }

        if self.at_line_start(outer) && !item.name.is_empty() {
            item.children = inner.items;
            item.calls = inner.calls;
            item.bindings = inner.bindings;
            scope.items.push(item);
        } else {
            scope.items.extend(inner.items);
            scope.calls.extend(inner.calls);
            scope.bindings.extend(inner.bindings);
        }
    }

    fn params(&self, params: Node) -> Vec<Param> {
        let mut out = Vec::new();
        let mut cursor = params.walk();
        for p in params.named_children(&mut cursor) {
            let (name, ty) = match p.kind() {
                "identifier" => (Some(p), None),
                "typed_parameter" => {
                    let mut c = p.walk();
                    let ident = p.named_children(&mut c).find(|n| n.kind() == "identifier");
                    (ident, p.child_by_field_name("type"))
                }
                "default_parameter" => (p.child_by_field_name("name"), None),
                "typed_default_parameter" => {
                    (p.child_by_field_name("name"), p.child_by_field_name("type"))
                }
                _ => (None, None),
            };
            if let Some(name) = name.filter(|n| n.kind() == "identifier") {
                out.push(Param {
                    name: self.text(name).to_string(),
                    annotation: ty.and_then(|t| self.annotation(t)),
                });
            }
        }
        out
    }

    /// Dotted class name from a type annotation, including `"Quoted"` forms.
    fn annotation(&self, ty: Node) -> Option<Vec<String>> {
        let expr = if ty.kind() == "type" {
            ty.named_child(0)?
        } else {
            ty
        };
        if expr.kind() == "string" {
            let raw = self.text(expr).trim_matches(|c| c == '"' || c == '\'');
            let parts: Vec<String> = raw.split('.').map(str::to_string).collect();
            let ok = parts.iter().all(|p| {
                !p.is_empty() && p.chars().all(|c| c.is_alphanumeric() || c == '_')
            });
            return ok.then_some(parts);
        }
        self.dotted(expr)
    }

    /// `a.b.c` as `["a", "b", "c"]` when built only from identifiers.
    fn dotted(&self, node: Node) -> Option<Vec<String>> {
        match node.kind() {
            "identifier" => Some(vec![self.text(node).to_string()]),
            "attribute" => {
                let mut base = self.dotted(node.child_by_field_name("object")?)?;
                base.push(self.text(node.child_by_field_name("attribute")?).to_string());
                Some(base)
            }
            _ => None,
        }
    }

    fn targets(&self, node: Node, out: &mut Vec<String>) {
        match node.kind() {
            "identifier" | "attribute" => {
                if let Some(path) = self.dotted(node) {
                    out.push(path.join("."));
                }
            }
            "pattern_list" | "tuple_pattern" | "list_pattern" | "list_splat_pattern" => {
                let mut cursor = node.walk();
                let kids: Vec<Node> = node.named_children(&mut cursor).collect();
                for k in kids {
                    self.targets(k, out);
                }
            }
            _ => {}
        }
    }

    fn assignment(&mut self, stmt: Node, scope: &mut Scope) {
        let Some(first) = stmt.named_child(0) else {
            return;
        };
        if first.kind() != "assignment" {
            return;
        }
        let mut names = Vec::new();
        let mut simple = Vec::new();
        let mut cur = first;
        let value = loop {
            if let Some(left) = cur.child_by_field_name("left") {
                self.targets(left, &mut names);
                if left.kind() == "identifier" {
                    simple.push(self.text(left).to_string());
                }
            }
            match cur.child_by_field_name("right") {
                Some(r) if r.kind() == "assignment" => cur = r,
                other => break other,
            }
        };
        if names.is_empty() {
            return;
        }
        if let Some(v) = value.filter(|v| v.kind() == "call") {
            if let Some(ctor) = v.child_by_field_name("function").and_then(|f| self.dotted(f)) {
                for name in simple {
                    scope.bindings.push(Binding {
                        name,
                        constructor: ctor.clone(),
                        line: line_of(stmt),
                    });
                }
            }
        }
        if self.at_line_start(stmt) {
            names.dedup();
            scope
                .items
                .push(Item::new(ItemKind::Attribute, names.join(","), line_range(stmt)));
        }
    }

    fn call(&mut self, node: Node, scope: &mut Scope) {
        let Some(func) = node.child_by_field_name("function") else {
            return;
        };
        let callee = match func.kind() {
            "identifier" => Callee::Name(self.text(func).to_string()),
            "attribute" => {
                let (Some(obj), Some(attr)) = (
                    func.child_by_field_name("object"),
                    func.child_by_field_name("attribute"),
                ) else {
                    return;
                };
                let receiver = if obj.kind() == "call"
                    && obj
                        .child_by_field_name("function")
                        .is_some_and(|f| f.kind() == "identifier" && self.text(f) == "super")
                {
                    Receiver::Super
                } else {
                    self.dotted(obj).map_or(Receiver::Other, Receiver::Path)
                };
                Callee::Method {
                    receiver,
                    method: self.text(attr).to_string(),
                }
            }
            _ => return,
        };
        scope.calls.push(CallSite {
            line: line_of(node),
            callee,
        });
    }

    fn dotted_name(&self, node: Node) -> Vec<String> {
        let mut cursor = node.walk();
        node.named_children(&mut cursor)
            .filter(|c| c.kind() == "identifier")
            .map(|c| self.text(c).to_string())
            .collect()
    }

    fn import(&mut self, node: Node) {
        let mut cursor = node.walk();
        let names: Vec<Node> = node.children_by_field_name("name", &mut cursor).collect();
        for n in names {
            let (path, alias) = match n.kind() {
                "dotted_name" => (self.dotted_name(n), None),
                "aliased_import" => (
                    n.child_by_field_name("name")
                        .map(|d| self.dotted_name(d))
                        .unwrap_or_default(),
                    n.child_by_field_name("alias").map(|a| self.text(a).to_string()),
                ),
                _ => continue,
            };
            if !path.is_empty() {
                self.imports.push(Import::Module {
                    path,
                    alias,
                    line: line_of(node),
                });
            }
        }
    }

    fn import_from(&mut self, node: Node) {
        let (level, module) = match node.child_by_field_name("module_name") {
            Some(m) if m.kind() == "relative_import" => {
                let mut cursor = m.walk();
                let mut level = 0;
                let mut module = Vec::new();
                for c in m.named_children(&mut cursor) {
                    match c.kind() {
                        "import_prefix" => level = self.text(c).matches('.').count(),
                        "dotted_name" => module = self.dotted_name(c),
                        _ => {}
                    }
                }
                (level, module)
            }
            Some(m) => (0, self.dotted_name(m)),
            None => return,
        };
        let mut names = Vec::new();
        let mut cursor = node.walk();
        let fields: Vec<Node> = node.children_by_field_name("name", &mut cursor).collect();
        for n in fields {
            match n.kind() {
                "dotted_name" => names.push((self.dotted_name(n).join("."), None)),
                "aliased_import" => {
                    let name = n
                        .child_by_field_name("name")
                        .map(|d| self.dotted_name(d).join("."))
                        .unwrap_or_default();
                    let alias = n.child_by_field_name("alias").map(|a| self.text(a).to_string());
                    names.push((name, alias));
                }
                _ => {}
            }
        }
        self.imports.push(Import::From {
            level,
            module,
            names,
            line: line_of(node),
        });
    }
}
