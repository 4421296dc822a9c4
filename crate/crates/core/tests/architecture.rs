use std::path::{Path, PathBuf};

fn sources(dir: &Path, out: &mut Vec<PathBuf>) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            sources(&path, out);
        } else if path.extension().is_some_and(|e| e == "rs") {
            out.push(path);
        }
    }
}

#[test]
fn only_the_llm_module_touches_the_network() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("src");
    let mut files = Vec::new();
    sources(&root, &mut files);
    assert!(files.len() > 20);
    for f in files {
        let rel = f.strip_prefix(&root).unwrap();
        if rel.starts_with("llm") {
            continue;
        }
        let text = std::fs::read_to_string(&f).unwrap();
        for needle in ["ureq", "std::net", "TcpStream"] {
            assert!(!text.contains(needle), "{} mentions {needle}", rel.display());
        }
    }
}

#[test]
fn engines_do_not_depend_on_the_pipeline() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("src");
    for layer in ["logiclang", "engines"] {
        let mut files = Vec::new();
        sources(&root.join(layer), &mut files);
        for f in files {
            let text = std::fs::read_to_string(&f).unwrap();
            for upper in ["crate::router", "crate::pipeline", "crate::decomposer", "crate::llm", "crate::harness"] {
                assert!(!text.contains(upper), "{} uses {upper}", f.display());
            }
        }
    }
}
