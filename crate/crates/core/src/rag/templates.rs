//! Bundled prompt templates with `{name}` slots.

pub const EXTRACTOR: &str = include_str!("../../templates/extractor.txt");
pub const INFERER: &str = include_str!("../../templates/inferer.txt");
pub const RERANK_STAGE1: &str = include_str!("../../templates/rerank_stage1.txt");
pub const RERANK_STAGE2: &str = include_str!("../../templates/rerank_stage2.txt");
pub const READER: &str = include_str!("../../templates/reader.txt");

/// Fills `{name}` slots in one pass. Unknown slots are left as written and
/// substituted values are never rescanned.
pub fn render(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let slot = after.find('}').map(|close| &after[..close]).and_then(|name| {
            values
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| (name.len(), *v))
        });
        match slot {
            Some((len, value)) => {
                out.push_str(value);
                rest = &after[len + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Lines between `[start_of_<tag>]` and `[end_of_<tag>]`, trimmed, empty
/// lines dropped. `None` when the opening tag is missing.
pub fn tagged_lines(text: &str, tag: &str) -> Option<Vec<String>> {
    let open = format!("[start_of_{tag}]");
    let close = format!("[end_of_{tag}]");
    let start = text.find(&open)? + open.len();
    let body = &text[start..];
    let body = &body[..body.find(&close).unwrap_or(body.len())];
    Some(
        body.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect(),
    )
}
