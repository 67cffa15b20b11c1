//! Pass multiplexing.
//!
//! Algorithms that split the graph into independent parts (the DFS
//! recursion, for instance) must let one pass serve every part at once.
//! Each part runs as a task; when a task needs a pass it hands a
//! [`Consumer`] to [`Hub::pass`] and awaits it. Once every live task is
//! waiting, the executor reads the stream once, routes each update to the
//! consumers registered for the part that owns both endpoints, and wakes
//! all tasks.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::future::Future;
use std::pin::Pin;
use std::rc::Rc;
use std::task::{Context, Poll, Waker};

use super::meter::StreamSession;
use super::stream::Model;
use crate::error::{Error, Result};
use crate::graph::Node;

pub type PartId = u32;
pub const NO_PART: PartId = u32::MAX;

/// Receives the updates of one pass whose endpoints lie in the consumer's
/// part. Endpoints are given as indices local to that part.
pub trait Consumer {
    fn update(&mut self, a: usize, b: usize, sign: i64);
    fn words(&self) -> usize {
        0
    }
}

trait Slot {
    fn update(&mut self, a: usize, b: usize, sign: i64);
    fn words(&self) -> usize;
    fn close(&mut self);
}

enum SlotState<C> {
    Open(C),
    Closed(C),
    Taken,
}

impl<C: Consumer> Slot for SlotState<C> {
    fn update(&mut self, a: usize, b: usize, sign: i64) {
        if let SlotState::Open(c) = self {
            c.update(a, b, sign);
        }
    }
    fn words(&self) -> usize {
        match self {
            SlotState::Open(c) | SlotState::Closed(c) => c.words(),
            SlotState::Taken => 0,
        }
    }
    fn close(&mut self) {
        if let SlotState::Open(_) = self {
            if let SlotState::Open(c) = std::mem::replace(self, SlotState::Taken) {
                *self = SlotState::Closed(c);
            }
        }
    }
}

type Task = Pin<Box<dyn Future<Output = Result<()>>>>;

pub struct Hub {
    n: usize,
    model: Model,
    owner: RefCell<Vec<PartId>>,
    local: RefCell<Vec<u32>>,
    next_part: Cell<PartId>,
    queue: RefCell<HashMap<PartId, Vec<Rc<RefCell<dyn Slot>>>>>,
    spawned: RefCell<Vec<Task>>,
    /// Words of algorithm state outside consumers, maintained by tasks.
    resident: Cell<usize>,
}

impl Hub {
    /// A hub whose single part 0 holds every node, with local id = node id.
    pub fn new(n: usize, model: Model) -> Rc<Hub> {
        Rc::new(Hub {
            n,
            model,
            owner: RefCell::new(vec![0; n]),
            local: RefCell::new((0..n as u32).collect()),
            next_part: Cell::new(1),
            queue: RefCell::new(HashMap::new()),
            spawned: RefCell::new(Vec::new()),
            resident: Cell::new(0),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// Moves `nodes` into a fresh part; local ids follow the slice order.
    pub fn new_part(&self, nodes: &[Node]) -> PartId {
        let id = self.next_part.get();
        self.next_part.set(id + 1);
        let mut owner = self.owner.borrow_mut();
        let mut local = self.local.borrow_mut();
        for (i, &x) in nodes.iter().enumerate() {
            owner[x] = id;
            local[x] = i as u32;
        }
        id
    }

    /// Removes nodes from every part; their edges stop being routed.
    pub fn retire(&self, nodes: &[Node]) {
        let mut owner = self.owner.borrow_mut();
        for &x in nodes {
            owner[x] = NO_PART;
        }
    }

    pub fn add_resident(&self, words: isize) {
        self.resident.set((self.resident.get() as isize + words).max(0) as usize);
    }

    pub fn spawn(&self, task: impl Future<Output = Result<()>> + 'static) {
        self.spawned.borrow_mut().push(Box::pin(task));
    }

    /// Registers `consumer` for the next pass over `part` and resolves to it
    /// once the pass is over.
    pub fn pass<C: Consumer + 'static>(&self, part: PartId, consumer: C) -> PassFuture<C> {
        let slot = Rc::new(RefCell::new(SlotState::Open(consumer)));
        let dyn_slot: Rc<RefCell<dyn Slot>> = slot.clone();
        self.queue.borrow_mut().entry(part).or_default().push(dyn_slot);
        PassFuture { slot }
    }

    /// Drives `root` and everything it spawns to completion.
    pub fn run(hub: &Rc<Hub>, session: &mut StreamSession<'_>, root: impl Future<Output = Result<()>> + 'static) -> Result<()> {
        if session.n() != hub.n || session.model() != hub.model {
            return Err(Error::Contract("hub does not match the stream".into()));
        }
        let waker = Waker::noop();
        let mut cx = Context::from_waker(waker);
        let mut tasks: Vec<Task> = vec![Box::pin(root)];
        loop {
            // Poll until every task is parked on a pass or done.
            loop {
                let mut i = 0;
                while i < tasks.len() {
                    match tasks[i].as_mut().poll(&mut cx) {
                        Poll::Ready(Ok(())) => {
                            drop(tasks.swap_remove(i));
                        }
                        Poll::Ready(Err(e)) => return Err(e),
                        Poll::Pending => i += 1,
                    }
                }
                let fresh: Vec<Task> = hub.spawned.borrow_mut().drain(..).collect();
                if fresh.is_empty() {
                    break;
                }
                tasks.extend(fresh);
            }
            let queue = std::mem::take(&mut *hub.queue.borrow_mut());
            if tasks.is_empty() {
                return Ok(());
            }
            if queue.is_empty() {
                return Err(Error::Contract("tasks are blocked without a pending pass".into()));
            }
            {
                let owner = hub.owner.borrow();
                let local = hub.local.borrow();
                for up in session.pass() {
                    let p = owner[up.u];
                    if p == NO_PART || p != owner[up.v] {
                        continue;
                    }
                    if let Some(slots) = queue.get(&p) {
                        let (a, b) = (local[up.u] as usize, local[up.v] as usize);
                        for s in slots {
                            s.borrow_mut().update(a, b, up.sign as i64);
                        }
                    }
                }
            }
            let words: usize = queue.values().flatten().map(|s| s.borrow().words()).sum();
            for s in queue.values().flatten() {
                s.borrow_mut().close();
            }
            session.charge(words + hub.resident.get())?;
        }
    }

    /// Runs a single task over the whole graph and returns its value.
    pub fn run_one<T: 'static, F>(session: &mut StreamSession<'_>, body: impl FnOnce(Rc<Hub>) -> F) -> Result<T>
    where
        F: Future<Output = Result<T>> + 'static,
    {
        let hub = Hub::new(session.n(), session.model());
        let out: Rc<RefCell<Option<T>>> = Rc::new(RefCell::new(None));
        let sink = out.clone();
        let fut = body(hub.clone());
        Hub::run(&hub, session, async move {
            let v = fut.await?;
            *sink.borrow_mut() = Some(v);
            Ok(())
        })?;
        let v = out.borrow_mut().take();
        v.ok_or_else(|| Error::Contract("task finished without a value".into()))
    }
}

pub struct PassFuture<C> {
    slot: Rc<RefCell<SlotState<C>>>,
}

impl<C> Future for PassFuture<C> {
    type Output = C;

    fn poll(self: Pin<&mut Self>, _cx: &mut Context<'_>) -> Poll<C> {
        let mut slot = self.slot.borrow_mut();
        match std::mem::replace(&mut *slot, SlotState::Taken) {
            SlotState::Closed(c) => Poll::Ready(c),
            other => {
                *slot = other;
                Poll::Pending
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate, Generator};

    struct Count(usize);
    impl Consumer for Count {
        fn update(&mut self, _: usize, _: usize, _: i64) {
            self.0 += 1;
        }
    }

    #[test]
    fn sibling_parts_share_passes() {
        let stream = generate(&Generator::Path(6), 0).unwrap();
        let mut session = StreamSession::new(&stream);
        let hub = Hub::new(6, Model::InsertionOnly);
        let results = Rc::new(RefCell::new(Vec::new()));
        let (h, r) = (hub.clone(), results.clone());
        Hub::run(&hub, &mut session, async move {
            let left = h.new_part(&[0, 1, 2]);
            let right = h.new_part(&[3, 4, 5]);
            for part in [left, right] {
                let (h2, r2) = (h.clone(), r.clone());
                h.spawn(async move {
                    let mut total = 0;
                    for _ in 0..3 {
                        total += h2.pass(part, Count(0)).await.0;
                    }
                    r2.borrow_mut().push(total);
                    Ok(())
                });
            }
            Ok(())
        })
        .unwrap();
        assert_eq!(*results.borrow(), vec![6, 6]);
        assert_eq!(session.passes(), 3);
    }
}
