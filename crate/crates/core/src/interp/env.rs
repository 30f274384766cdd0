use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::value::Value;

#[derive(Debug)]
struct Binding<'a> {
    value: Value<'a>,
    mutable: bool,
}

#[derive(Debug, Default)]
struct Scope<'a> {
    vars: HashMap<String, Binding<'a>>,
    parent: Option<Env<'a>>,
    /// Function bodies and the program root; `var` lands here.
    function_scope: bool,
}

/// A lexical scope chain. Cloning shares the scope.
#[derive(Debug, Clone)]
pub struct Env<'a>(Rc<RefCell<Scope<'a>>>);

pub enum AssignError {
    Undeclared,
    Constant,
}

impl<'a> Env<'a> {
    pub fn root() -> Self {
        Env(Rc::new(RefCell::new(Scope {
            function_scope: true,
            ..Scope::default()
        })))
    }

    pub fn child(&self, function_scope: bool) -> Self {
        Env(Rc::new(RefCell::new(Scope {
            vars: HashMap::new(),
            parent: Some(self.clone()),
            function_scope,
        })))
    }

    /// Returns false when the name already exists in this scope.
    pub fn declare(&self, name: &str, value: Value<'a>, mutable: bool) -> bool {
        let mut scope = self.0.borrow_mut();
        if scope.vars.contains_key(name) {
            return false;
        }
        scope.vars.insert(name.to_string(), Binding { value, mutable });
        true
    }

    /// `var` semantics: declare in the nearest function scope, re-declaration
    /// keeps the binding and only assigns.
    pub fn declare_var(&self, name: &str, value: Value<'a>) -> bool {
        let mut env = self.clone();
        loop {
            let next = {
                let scope = env.0.borrow();
                if scope.function_scope {
                    None
                } else {
                    scope.parent.clone()
                }
            };
            match next {
                Some(parent) => env = parent,
                None => break,
            }
        }
        let mut scope = env.0.borrow_mut();
        match scope.vars.get_mut(name) {
            Some(b) if b.mutable => {
                b.value = value;
                true
            }
            Some(_) => false,
            None => {
                scope.vars.insert(name.to_string(), Binding { value, mutable: true });
                true
            }
        }
    }

    /// Drops every binding in this scope, breaking closure reference cycles.
    pub fn clear(&self) {
        let vars = std::mem::take(&mut self.0.borrow_mut().vars);
        drop(vars);
    }

    pub fn get(&self, name: &str) -> Option<Value<'a>> {
        let scope = self.0.borrow();
        match scope.vars.get(name) {
            Some(b) => Some(b.value.clone()),
            None => scope.parent.as_ref()?.get(name),
        }
    }

    pub fn assign(&self, name: &str, value: Value<'a>) -> Result<(), AssignError> {
        let mut scope = self.0.borrow_mut();
        match scope.vars.get_mut(name) {
            Some(b) if b.mutable => {
                b.value = value;
                Ok(())
            }
            Some(_) => Err(AssignError::Constant),
            None => match &scope.parent {
                Some(parent) => parent.assign(name, value),
                None => Err(AssignError::Undeclared),
            },
        }
    }
}
