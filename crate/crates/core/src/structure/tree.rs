use thiserror::Error;

use super::{Binding, BodyExpr, OpKind, Program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("no rule for {0}")]
    UnknownRoot(String),
    #[error("{caller} references undefined subsection {callee}")]
    UnknownCallee { caller: String, callee: String },
    #[error("depth cap must be at least 1")]
    ZeroCap,
}

/// A subsection occurrence. `bindings` come from the referencing clause and
/// are empty for the root. Depth is 1 at the root and grows by one per
/// subsection reference; operator nodes do not add depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsectionNode {
    pub id: String,
    pub params: Vec<String>,
    pub bindings: Vec<Binding>,
    pub depth: usize,
    pub child: Option<Box<DepNode>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpNode {
    pub kind: OpKind,
    pub depth: usize,
    pub children: Vec<DepNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DepNode {
    Subsection(SubsectionNode),
    Op(OpNode),
}

impl DepNode {
    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a DepNode)) {
        f(self);
        match self {
            DepNode::Subsection(s) => {
                if let Some(c) = &s.child {
                    c.visit(f);
                }
            }
            DepNode::Op(o) => o.children.iter().for_each(|c| c.visit(f)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepTree {
    pub root: SubsectionNode,
}

impl DepTree {
    fn nodes(&self) -> Vec<&DepNode> {
        let mut out = Vec::new();
        if let Some(c) = &self.root.child {
            c.visit(&mut |n| out.push(n));
        }
        out
    }

    /// Deepest subsection level.
    pub fn depth(&self) -> usize {
        self.nodes()
            .into_iter()
            .filter_map(|n| match n {
                DepNode::Subsection(s) => Some(s.depth),
                DepNode::Op(_) => None,
            })
            .fold(self.root.depth, usize::max)
    }

    /// All nodes, the root included.
    pub fn node_count(&self) -> usize {
        1 + self.nodes().len()
    }

    /// Subsection nodes excluding the root.
    pub fn subsections(&self) -> Vec<&SubsectionNode> {
        self.nodes()
            .into_iter()
            .filter_map(|n| match n {
                DepNode::Subsection(s) => Some(s),
                DepNode::Op(_) => None,
            })
            .collect()
    }

    pub fn is_leaf(&self) -> bool {
        self.root.child.is_none()
    }
}

/// Unrolls the rule base from `root_id`. A subsection at depth `depth_cap`
/// keeps no child, which also bounds recursive references.
pub fn build_dependency_tree(program: &Program, root_id: &str, depth_cap: usize) -> Result<DepTree, TreeError> {
    if depth_cap == 0 {
        return Err(TreeError::ZeroCap);
    }
    if !program.contains(root_id) {
        return Err(TreeError::UnknownRoot(root_id.to_string()));
    }
    Ok(DepTree { root: subsection(program, root_id, Vec::new(), 1, depth_cap)? })
}

fn subsection(
    program: &Program,
    id: &str,
    bindings: Vec<Binding>,
    depth: usize,
    cap: usize,
) -> Result<SubsectionNode, TreeError> {
    let rule = program.get(id).expect("caller checked the id");
    let child = match &rule.body {
        Some(body) if depth < cap => Some(Box::new(expand(program, id, body, depth, cap)?)),
        _ => None,
    };
    Ok(SubsectionNode { id: id.to_string(), params: rule.params.clone(), bindings, depth, child })
}

fn expand(program: &Program, caller: &str, body: &BodyExpr, depth: usize, cap: usize) -> Result<DepNode, TreeError> {
    let op = |kind, xs: &[BodyExpr]| -> Result<DepNode, TreeError> {
        let children = xs.iter().map(|x| expand(program, caller, x, depth, cap)).collect::<Result<_, _>>()?;
        Ok(DepNode::Op(OpNode { kind, depth, children }))
    };
    match body {
        BodyExpr::Ref { callee, bindings } => {
            if !program.contains(callee) {
                return Err(TreeError::UnknownCallee { caller: caller.to_string(), callee: callee.clone() });
            }
            Ok(DepNode::Subsection(subsection(program, callee, bindings.clone(), depth + 1, cap)?))
        }
        BodyExpr::And(xs) => op(OpKind::And, xs),
        BodyExpr::Or(xs) => op(OpKind::Or, xs),
        BodyExpr::Not(x) => op(OpKind::Not, std::slice::from_ref(x.as_ref())),
    }
}
