use std::cell::Cell;

use hullcache::hull::HullTopology;
use hullcache::layouts::{
    build_internally_connected, face_traversing_with, spherical_with, FaceTraversingHull,
    InternallyConnectedHull, SphericalHull, DEFAULT_FILL_RADIUS_FRACTION,
};
use hullcache::support::{
    Direction, HillClimbHull, Method, NaiveHull, Step, SupportMap, SupportQueryResult,
};
use hullcache::{Error, Vec3};

use crate::error::Result;

/// The five backends for one hull. Face layouts are absent when the hull
/// has more faces than 16-bit indices can address.
pub struct Backends {
    pub naive: NaiveHull,
    pub hill_climb: HillClimbHull,
    pub internally_connected: InternallyConnectedHull,
    pub face_traversing: Option<FaceTraversingHull>,
    pub spherical: Option<SphericalHull>,
}

fn capacity_ok<T>(r: hullcache::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::CapacityExceeded(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

impl Backends {
    pub fn build(hull: &HullTopology) -> Result<Backends> {
        let ic = build_internally_connected(hull, DEFAULT_FILL_RADIUS_FRACTION)?;
        Ok(Backends {
            naive: NaiveHull::new(hull),
            hill_climb: HillClimbHull::new(hull),
            face_traversing: capacity_ok(face_traversing_with(hull, ic.clone()))?,
            spherical: capacity_ok(spherical_with(hull, ic.clone()))?,
            internally_connected: ic,
        })
    }

    pub fn get(&self, m: Method) -> Option<&dyn SupportMap> {
        match m {
            Method::Naive => Some(&self.naive),
            Method::HillClimb => Some(&self.hill_climb),
            Method::InternallyConnected => Some(&self.internally_connected),
            Method::FaceTraversing => self.face_traversing.as_ref().map(|x| x as &dyn SupportMap),
            Method::Spherical => self.spherical.as_ref().map(|x| x as &dyn SupportMap),
        }
    }
}

/// Wraps a backend and totals the visit counts of every query.
pub struct Counting<'a> {
    inner: &'a dyn SupportMap,
    pub queries: Cell<u64>,
    pub vertex_visits: Cell<u64>,
    pub face_visits: Cell<u64>,
}

impl<'a> Counting<'a> {
    pub fn new(inner: &'a dyn SupportMap) -> Self {
        Counting {
            inner,
            queries: Cell::new(0),
            vertex_visits: Cell::new(0),
            face_visits: Cell::new(0),
        }
    }

    fn count(&self, r: SupportQueryResult) -> SupportQueryResult {
        self.queries.set(self.queries.get() + 1);
        self.vertex_visits
            .set(self.vertex_visits.get() + u64::from(r.stats.vertex_visits));
        self.face_visits
            .set(self.face_visits.get() + u64::from(r.stats.face_visits));
        r
    }
}

impl SupportMap for Counting<'_> {
    fn support(&self, d: &Direction) -> SupportQueryResult {
        self.count(self.inner.support(d))
    }
    fn support_traced(&self, d: &Direction, trace: &mut Vec<Step>) -> SupportQueryResult {
        self.count(self.inner.support_traced(d, trace))
    }
    fn center(&self) -> Vec3 {
        self.inner.center()
    }
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }
}
