//! Canonical XML form of the OpenDRIVE 1.4 and OpenSCENARIO 1.1 subsets.
//!
//! Output is UTF-8 with two-space indentation, attributes in schema order and
//! floats in shortest round-trip notation, so serializing a parsed file
//! reproduces it byte for byte. Parsing accepts unknown elements and reports
//! them as diagnostics.

use std::cell::Cell;
use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event as XmlEvent};
use quick_xml::Reader;
use scenex_core::openx::{
    Action, BoundingBox, Condition, Entity, Event, FileHeader, Geometry, GeometryShape, InitState, LaneOffset,
    LaneSection, ManeuverGroup, OdrDocument, OdrHeader, OdrLane, OdrRoad, OpenXError, OscDocument,
    ParameterDeclaration,
};
use scenex_core::scenario_detect::TriggerRule;

#[derive(Debug, thiserror::Error)]
pub enum XmlError {
    #[error("malformed XML at byte {offset}: {message}")]
    Malformed { offset: u64, message: String },
    #[error("missing mandatory element <{element}> in <{parent}> at byte {offset}")]
    Missing { element: &'static str, parent: String, offset: u64 },
    #[error("<{element}> at byte {offset}: missing attribute `{attribute}`")]
    MissingAttribute { element: String, attribute: &'static str, offset: u64 },
    #[error("<{element}> at byte {offset}: bad value {value:?} for `{attribute}`")]
    BadAttribute { element: String, attribute: &'static str, value: String, offset: u64 },
    #[error("root element is <{found}>, expected <{expected}>")]
    WrongRoot { expected: &'static str, found: String },
    #[error(transparent)]
    Invalid(#[from] OpenXError),
}

/// A tolerated oddity found while parsing.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub offset: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdrParseResult {
    pub document: OdrDocument,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscParseResult {
    pub document: OscDocument,
    pub diagnostics: Vec<Diagnostic>,
}

fn num(v: f64) -> String {
    format!("{v}")
}

struct Out {
    text: String,
    depth: usize,
}

impl Out {
    fn new() -> Self {
        Self { text: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"), depth: 0 }
    }

    fn tag(&mut self, name: &str, attrs: &[(&str, String)], close: bool) {
        for _ in 0..self.depth {
            self.text.push_str("  ");
        }
        self.text.push('<');
        self.text.push_str(name);
        for (k, v) in attrs {
            let _ = write!(self.text, " {k}=\"{}\"", escape(v.as_str()));
        }
        self.text.push_str(if close { "/>\n" } else { ">\n" });
    }

    fn open(&mut self, name: &str, attrs: &[(&str, String)]) {
        self.tag(name, attrs, false);
        self.depth += 1;
    }

    fn empty(&mut self, name: &str, attrs: &[(&str, String)]) {
        self.tag(name, attrs, true);
    }

    fn close(&mut self, name: &str) {
        self.depth -= 1;
        for _ in 0..self.depth {
            self.text.push_str("  ");
        }
        let _ = writeln!(self.text, "</{name}>");
    }
}

fn s(v: impl ToString) -> String {
    v.to_string()
}

fn odr_lane(out: &mut Out, lane: &OdrLane) {
    out.open("lane", &[("id", s(lane.id)), ("type", lane.lane_type.clone()), ("level", s("false"))]);
    out.empty("width", &[("sOffset", s("0")), ("a", num(lane.width)), ("b", s("0")), ("c", s("0")), ("d", s("0"))]);
    out.close("lane");
}

/// Serializes a validated OpenDRIVE document in canonical form.
pub fn serialize_opendrive(doc: &OdrDocument) -> Result<String, OpenXError> {
    doc.validate()?;
    let mut out = Out::new();
    let road = &doc.road;
    out.open("OpenDRIVE", &[]);
    out.empty(
        "header",
        &[("revMajor", s(doc.header.rev_major)), ("revMinor", s(doc.header.rev_minor)), ("name", doc.header.name.clone())],
    );
    out.open("road", &[("name", road.name.clone()), ("length", num(road.length)), ("id", road.id.clone()), ("junction", s("-1"))]);
    out.open("planView", &[]);
    for g in &road.geometries {
        out.open("geometry", &[("s", num(g.s)), ("x", num(g.x)), ("y", num(g.y)), ("hdg", num(g.hdg)), ("length", num(g.length))]);
        match g.shape {
            GeometryShape::Line => out.empty("line", &[]),
            GeometryShape::Spiral { curv_start, curv_end } => {
                out.empty("spiral", &[("curvStart", num(curv_start)), ("curvEnd", num(curv_end))])
            }
        }
        out.close("geometry");
    }
    out.close("planView");
    out.open("lanes", &[]);
    for o in &road.lane_offsets {
        out.empty("laneOffset", &[("s", num(o.s)), ("a", num(o.a)), ("b", s("0")), ("c", s("0")), ("d", s("0"))]);
    }
    for ls in &road.lane_sections {
        out.open("laneSection", &[("s", num(ls.s))]);
        if !ls.left.is_empty() {
            out.open("left", &[]);
            let mut left: Vec<&OdrLane> = ls.left.iter().collect();
            left.sort_by_key(|l| -l.id);
            for lane in left {
                odr_lane(&mut out, lane);
            }
            out.close("left");
        }
        out.open("center", &[]);
        out.empty("lane", &[("id", s("0")), ("type", s("none")), ("level", s("false"))]);
        out.close("center");
        if !ls.right.is_empty() {
            out.open("right", &[]);
            for lane in &ls.right {
                odr_lane(&mut out, lane);
            }
            out.close("right");
        }
        out.close("laneSection");
    }
    out.close("lanes");
    out.close("road");
    out.close("OpenDRIVE");
    Ok(out.text)
}

fn speed_action(out: &mut Out, shape: &str, duration: f64, speed: f64) {
    out.open("LongitudinalAction", &[]);
    out.open("SpeedAction", &[]);
    out.empty("SpeedActionDynamics", &[("dynamicsShape", s(shape)), ("value", num(duration)), ("dynamicsDimension", s("time"))]);
    out.open("SpeedActionTarget", &[]);
    out.empty("AbsoluteTargetSpeed", &[("value", num(speed))]);
    out.close("SpeedActionTarget");
    out.close("SpeedAction");
    out.close("LongitudinalAction");
}

fn osc_entity(out: &mut Out, e: &Entity) {
    let b = &e.bounding_box;
    out.open("ScenarioObject", &[("name", e.name.clone())]);
    out.open("Vehicle", &[("name", e.vehicle_name.clone()), ("vehicleCategory", e.category.clone())]);
    out.empty("ParameterDeclarations", &[]);
    out.empty("Performance", &[("maxSpeed", s("69")), ("maxAcceleration", s("10")), ("maxDeceleration", s("10"))]);
    out.open("BoundingBox", &[]);
    out.empty("Center", &[("x", num(b.center[0])), ("y", num(b.center[1])), ("z", num(b.center[2]))]);
    out.empty("Dimensions", &[("width", num(b.dimensions[1])), ("length", num(b.dimensions[0])), ("height", num(b.dimensions[2]))]);
    out.close("BoundingBox");
    out.open("Axles", &[]);
    for (name, x) in [("FrontAxle", "3.1"), ("RearAxle", "0")] {
        out.empty(
            name,
            &[("maxSteering", s("0.5")), ("wheelDiameter", s("0.6")), ("trackWidth", s("1.8")), ("positionX", s(x)), ("positionZ", s("0.3"))],
        );
    }
    out.close("Axles");
    out.empty("Properties", &[]);
    out.close("Vehicle");
    out.close("ScenarioObject");
}

fn osc_event(out: &mut Out, ev: &Event) {
    out.open("Event", &[("name", ev.name.clone()), ("priority", s("overwrite"))]);
    out.open("Action", &[("name", format!("{}Action", ev.name))]);
    out.open("PrivateAction", &[]);
    match ev.action {
        Action::AbsoluteSpeed { speed, duration } => speed_action(out, "linear", duration, speed),
        Action::LaneChange { target_lane, duration } => {
            out.open("LateralAction", &[]);
            out.open("LaneChangeAction", &[]);
            out.empty("LaneChangeActionDynamics", &[("dynamicsShape", s("cubic")), ("value", num(duration)), ("dynamicsDimension", s("time"))]);
            out.open("LaneChangeTarget", &[]);
            out.empty("AbsoluteTargetLane", &[("value", s(target_lane))]);
            out.close("LaneChangeTarget");
            out.close("LaneChangeAction");
            out.close("LateralAction");
        }
    }
    out.close("PrivateAction");
    out.close("Action");
    out.open("StartTrigger", &[]);
    out.open("ConditionGroup", &[]);
    out.open("Condition", &[("name", format!("{}Condition", ev.name)), ("delay", s("0")), ("conditionEdge", s("rising"))]);
    out.open("ByEntityCondition", &[]);
    out.open("TriggeringEntities", &[("triggeringEntitiesRule", s("any"))]);
    out.empty("EntityRef", &[("entityRef", ev.condition.entity().to_string())]);
    out.close("TriggeringEntities");
    out.open("EntityCondition", &[]);
    match &ev.condition {
        Condition::TraveledDistance { value, .. } => out.empty("TraveledDistanceCondition", &[("value", num(*value))]),
        Condition::RelativeDistance { reference, value, rule, .. } => out.empty(
            "RelativeDistanceCondition",
            &[
                ("entityRef", reference.clone()),
                ("relativeDistanceType", s("longitudinal")),
                ("value", num(*value)),
                ("freespace", s("false")),
                ("rule", s(rule.as_str())),
                ("coordinateSystem", s("road")),
            ],
        ),
    }
    out.close("EntityCondition");
    out.close("ByEntityCondition");
    out.close("Condition");
    out.close("ConditionGroup");
    out.close("StartTrigger");
    out.close("Event");
}

/// Serializes a validated OpenSCENARIO document in canonical form.
pub fn serialize_openscenario(doc: &OscDocument) -> Result<String, OpenXError> {
    doc.validate()?;
    let mut out = Out::new();
    let h = &doc.header;
    out.open("OpenSCENARIO", &[]);
    out.empty(
        "FileHeader",
        &[
            ("revMajor", s(h.rev_major)),
            ("revMinor", s(h.rev_minor)),
            ("date", h.date.clone()),
            ("description", h.description.clone()),
            ("author", h.author.clone()),
        ],
    );
    if doc.parameters.is_empty() {
        out.empty("ParameterDeclarations", &[]);
    } else {
        out.open("ParameterDeclarations", &[]);
        for p in &doc.parameters {
            out.empty("ParameterDeclaration", &[("name", p.name.clone()), ("parameterType", p.parameter_type.clone()), ("value", p.value.clone())]);
        }
        out.close("ParameterDeclarations");
    }
    out.empty("CatalogLocations", &[]);
    out.open("RoadNetwork", &[]);
    out.empty("LogicFile", &[("filepath", doc.road_network.clone())]);
    out.close("RoadNetwork");
    out.open("Entities", &[]);
    for e in &doc.entities {
        osc_entity(&mut out, e);
    }
    out.close("Entities");
    out.open("Storyboard", &[]);
    out.open("Init", &[]);
    out.open("Actions", &[]);
    for init in &doc.init {
        out.open("Private", &[("entityRef", init.entity.clone())]);
        out.open("PrivateAction", &[]);
        out.open("TeleportAction", &[]);
        out.open("Position", &[]);
        out.empty("LanePosition", &[("roadId", init.road_id.clone()), ("laneId", s(init.lane_id)), ("offset", s("0")), ("s", num(init.s))]);
        out.close("Position");
        out.close("TeleportAction");
        out.close("PrivateAction");
        out.open("PrivateAction", &[]);
        speed_action(&mut out, "step", 0.0, init.speed);
        out.close("PrivateAction");
        out.close("Private");
    }
    out.close("Actions");
    out.close("Init");
    out.open("Story", &[("name", doc.story_name.clone())]);
    out.open("Act", &[("name", s("Act"))]);
    for g in &doc.maneuver_groups {
        out.open("ManeuverGroup", &[("name", g.name.clone()), ("maximumExecutionCount", s("1"))]);
        out.open("Actors", &[("selectTriggeringEntities", s("false"))]);
        out.empty("EntityRef", &[("entityRef", g.actor.clone())]);
        out.close("Actors");
        out.open("Maneuver", &[("name", format!("{}Maneuver", g.actor))]);
        for ev in &g.events {
            osc_event(&mut out, ev);
        }
        out.close("Maneuver");
        out.close("ManeuverGroup");
    }
    out.open("StartTrigger", &[]);
    out.open("ConditionGroup", &[]);
    out.open("Condition", &[("name", s("ActStart")), ("delay", s("0")), ("conditionEdge", s("rising"))]);
    out.open("ByValueCondition", &[]);
    out.empty("SimulationTimeCondition", &[("value", s("0")), ("rule", s("greaterThan"))]);
    out.close("ByValueCondition");
    out.close("Condition");
    out.close("ConditionGroup");
    out.close("StartTrigger");
    out.close("Act");
    out.close("Story");
    out.empty("StopTrigger", &[]);
    out.close("Storyboard");
    out.close("OpenSCENARIO");
    Ok(out.text)
}

/// Generic element tree; `used` marks elements the document mapping consumed.
struct Node {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Node>,
    offset: u64,
    used: Cell<bool>,
}

fn start_node(b: &BytesStart, offset: u64) -> Result<Node, XmlError> {
    let name = String::from_utf8_lossy(b.name().as_ref()).into_owned();
    let mut attrs = Vec::new();
    for a in b.attributes() {
        let a = a.map_err(|e| XmlError::Malformed { offset, message: e.to_string() })?;
        let value = a.unescape_value().map_err(|e| XmlError::Malformed { offset, message: e.to_string() })?;
        attrs.push((String::from_utf8_lossy(a.key.as_ref()).into_owned(), value.into_owned()));
    }
    Ok(Node { name, attrs, children: Vec::new(), offset, used: Cell::new(false) })
}

fn parse_tree(text: &str) -> Result<Node, XmlError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);
    let mut stack: Vec<Node> = Vec::new();
    let mut root: Option<Node> = None;
    let end = text.len() as u64;
    let attach = |node: Node, stack: &mut Vec<Node>, root: &mut Option<Node>| -> Result<(), XmlError> {
        match stack.last_mut() {
            Some(parent) => parent.children.push(node),
            None if root.is_none() => *root = Some(node),
            None => return Err(XmlError::Malformed { offset: node.offset, message: "more than one root element".into() }),
        }
        Ok(())
    };
    loop {
        let offset = reader.buffer_position();
        match reader.read_event() {
            Err(e) => return Err(XmlError::Malformed { offset: reader.error_position(), message: e.to_string() }),
            Ok(XmlEvent::Start(b)) => stack.push(start_node(&b, offset)?),
            Ok(XmlEvent::Empty(b)) => attach(start_node(&b, offset)?, &mut stack, &mut root)?,
            Ok(XmlEvent::End(_)) => {
                let node = stack.pop().ok_or_else(|| XmlError::Malformed { offset, message: "unmatched end tag".into() })?;
                attach(node, &mut stack, &mut root)?;
            }
            Ok(XmlEvent::Eof) => break,
            Ok(_) => {}
        }
    }
    if let Some(open) = stack.last() {
        return Err(XmlError::Malformed { offset: end, message: format!("document ends inside <{}>", open.name) });
    }
    root.ok_or(XmlError::Malformed { offset: end, message: "no root element".into() })
}

impl Node {
    fn children(&self, name: &'static str) -> impl Iterator<Item = &Node> {
        self.children.iter().filter(move |c| c.name == name).inspect(|c| c.used.set(true))
    }

    fn child(&self, name: &'static str) -> Option<&Node> {
        self.children(name).next()
    }

    fn require(&self, name: &'static str) -> Result<&Node, XmlError> {
        self.child(name).ok_or_else(|| XmlError::Missing { element: name, parent: self.name.clone(), offset: self.offset })
    }

    /// Marks the named children and their subtrees as understood without
    /// mapping them.
    fn touch(&self, names: &[&'static str]) {
        for n in names {
            self.children(n).for_each(mark_subtree);
        }
    }

    fn attr(&self, name: &'static str) -> Result<&str, XmlError> {
        self.attrs.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str()).ok_or_else(|| XmlError::MissingAttribute {
            element: self.name.clone(),
            attribute: name,
            offset: self.offset,
        })
    }

    fn parsed<T: std::str::FromStr>(&self, name: &'static str) -> Result<T, XmlError> {
        let raw = self.attr(name)?;
        raw.parse().map_err(|_| XmlError::BadAttribute {
            element: self.name.clone(),
            attribute: name,
            value: raw.to_string(),
            offset: self.offset,
        })
    }

    fn diagnostics(&self, out: &mut Vec<Diagnostic>) {
        for c in &self.children {
            if c.used.get() {
                c.diagnostics(out);
            } else {
                out.push(Diagnostic { offset: c.offset, message: format!("unknown element <{}> inside <{}> ignored", c.name, self.name) });
            }
        }
    }

    fn bad(&self, attribute: &'static str, value: &str) -> XmlError {
        XmlError::BadAttribute { element: self.name.clone(), attribute, value: value.to_string(), offset: self.offset }
    }
}

fn root<'a>(tree: &'a Node, expected: &'static str) -> Result<&'a Node, XmlError> {
    if tree.name != expected {
        return Err(XmlError::WrongRoot { expected, found: tree.name.clone() });
    }
    Ok(tree)
}

fn parse_lane(node: &Node) -> Result<OdrLane, XmlError> {
    let width = node.require("width")?;
    Ok(OdrLane { id: node.parsed("id")?, lane_type: node.attr("type")?.to_string(), width: width.parsed("a")? })
}

fn parse_lanes(section: &Node, side: &'static str) -> Result<Vec<OdrLane>, XmlError> {
    match section.child(side) {
        Some(n) => n.children("lane").map(parse_lane).collect(),
        None => Ok(Vec::new()),
    }
}

pub fn parse_opendrive(text: &str) -> Result<OdrParseResult, XmlError> {
    let tree = parse_tree(text)?;
    let top = root(&tree, "OpenDRIVE")?;
    let header = top.require("header")?;
    let road = top.require("road")?;
    let plan = road.require("planView")?;
    let mut geometries = Vec::new();
    for g in plan.children("geometry") {
        let shape = if g.child("line").is_some() {
            GeometryShape::Line
        } else if let Some(sp) = g.child("spiral") {
            GeometryShape::Spiral { curv_start: sp.parsed("curvStart")?, curv_end: sp.parsed("curvEnd")? }
        } else {
            return Err(XmlError::Missing { element: "line", parent: g.name.clone(), offset: g.offset });
        };
        geometries.push(Geometry { s: g.parsed("s")?, x: g.parsed("x")?, y: g.parsed("y")?, hdg: g.parsed("hdg")?, length: g.parsed("length")?, shape });
    }
    let lanes = road.require("lanes")?;
    let lane_offsets = lanes.children("laneOffset").map(|o| Ok(LaneOffset { s: o.parsed("s")?, a: o.parsed("a")? })).collect::<Result<_, XmlError>>()?;
    let mut lane_sections = Vec::new();
    lanes.require("laneSection")?;
    for ls in lanes.children("laneSection") {
        ls.require("center")?.touch(&["lane"]);
        let mut left = parse_lanes(ls, "left")?;
        left.sort_by_key(|l| l.id);
        let mut right = parse_lanes(ls, "right")?;
        right.sort_by_key(|l| -l.id);
        lane_sections.push(LaneSection { s: ls.parsed("s")?, left, right });
    }
    let document = OdrDocument {
        header: OdrHeader { rev_major: header.parsed("revMajor")?, rev_minor: header.parsed("revMinor")?, name: header.attr("name")?.to_string() },
        road: OdrRoad {
            name: road.attr("name")?.to_string(),
            id: road.attr("id")?.to_string(),
            length: road.parsed("length")?,
            geometries,
            lane_offsets,
            lane_sections,
        },
    };
    let mut diagnostics = Vec::new();
    tree.diagnostics(&mut diagnostics);
    Ok(OdrParseResult { document, diagnostics })
}

fn parse_entity(node: &Node) -> Result<Entity, XmlError> {
    let v = node.require("Vehicle")?;
    v.touch(&["ParameterDeclarations", "Performance", "Axles", "Properties"]);
    let b = v.require("BoundingBox")?;
    let c = b.require("Center")?;
    let d = b.require("Dimensions")?;
    Ok(Entity {
        name: node.attr("name")?.to_string(),
        vehicle_name: v.attr("name")?.to_string(),
        category: v.attr("vehicleCategory")?.to_string(),
        bounding_box: BoundingBox {
            center: [c.parsed("x")?, c.parsed("y")?, c.parsed("z")?],
            dimensions: [d.parsed("length")?, d.parsed("width")?, d.parsed("height")?],
        },
    })
}

/// Reads a speed action, returning `(speed, duration)`.
fn parse_speed(private_action: &Node) -> Result<Option<(f64, f64)>, XmlError> {
    let Some(long) = private_action.child("LongitudinalAction") else {
        return Ok(None);
    };
    let sa = long.require("SpeedAction")?;
    let dynamics = sa.require("SpeedActionDynamics")?;
    dynamics.attr("dynamicsShape")?;
    let target = sa.require("SpeedActionTarget")?.require("AbsoluteTargetSpeed")?;
    Ok(Some((target.parsed("value")?, dynamics.parsed("value")?)))
}

fn parse_init(private: &Node) -> Result<InitState, XmlError> {
    let entity = private.attr("entityRef")?.to_string();
    let mut position = None;
    let mut speed = None;
    for pa in private.children("PrivateAction") {
        if let Some(tp) = pa.child("TeleportAction") {
            let lp = tp.require("Position")?.require("LanePosition")?;
            lp.attr("offset")?;
            position = Some((lp.attr("roadId")?.to_string(), lp.parsed("laneId")?, lp.parsed("s")?));
        } else if let Some((v, _)) = parse_speed(pa)? {
            speed = Some(v);
        }
    }
    let (road_id, lane_id, s) =
        position.ok_or_else(|| XmlError::Missing { element: "TeleportAction", parent: private.name.clone(), offset: private.offset })?;
    let speed = speed.ok_or_else(|| XmlError::Missing { element: "LongitudinalAction", parent: private.name.clone(), offset: private.offset })?;
    Ok(InitState { entity, speed, road_id, lane_id, s })
}

fn parse_condition(event: &Node) -> Result<Condition, XmlError> {
    let cond = event.require("StartTrigger")?.require("ConditionGroup")?.require("Condition")?;
    let by = cond.require("ByEntityCondition")?;
    let entity = by.require("TriggeringEntities")?.require("EntityRef")?.attr("entityRef")?.to_string();
    let ec = by.require("EntityCondition")?;
    if let Some(td) = ec.child("TraveledDistanceCondition") {
        return Ok(Condition::TraveledDistance { entity, value: td.parsed("value")? });
    }
    let rd = ec.require("RelativeDistanceCondition")?;
    let rule = match rd.attr("rule")? {
        "lessThan" => TriggerRule::LessThan,
        "greaterThan" => TriggerRule::GreaterThan,
        other => return Err(rd.bad("rule", other)),
    };
    let kind = rd.attr("relativeDistanceType")?;
    if kind != "longitudinal" {
        return Err(rd.bad("relativeDistanceType", kind));
    }
    Ok(Condition::RelativeDistance { entity, reference: rd.attr("entityRef")?.to_string(), value: rd.parsed("value")?, rule })
}

fn parse_event(node: &Node) -> Result<Event, XmlError> {
    let pa = node.require("Action")?.require("PrivateAction")?;
    let action = if let Some((speed, duration)) = parse_speed(pa)? {
        Action::AbsoluteSpeed { speed, duration }
    } else {
        let lc = pa.require("LateralAction")?.require("LaneChangeAction")?;
        let duration = lc.require("LaneChangeActionDynamics")?.parsed("value")?;
        let target_lane = lc.require("LaneChangeTarget")?.require("AbsoluteTargetLane")?.parsed("value")?;
        Action::LaneChange { target_lane, duration }
    };
    Ok(Event { name: node.attr("name")?.to_string(), condition: parse_condition(node)?, action })
}

pub fn parse_openscenario(text: &str) -> Result<OscParseResult, XmlError> {
    let tree = parse_tree(text)?;
    let top = root(&tree, "OpenSCENARIO")?;
    top.touch(&["CatalogLocations"]);
    let h = top.require("FileHeader")?;
    let header = FileHeader {
        rev_major: h.parsed("revMajor")?,
        rev_minor: h.parsed("revMinor")?,
        date: h.attr("date")?.to_string(),
        description: h.attr("description")?.to_string(),
        author: h.attr("author")?.to_string(),
    };
    let parameters = match top.child("ParameterDeclarations") {
        Some(p) => p
            .children("ParameterDeclaration")
            .map(|d| {
                Ok(ParameterDeclaration {
                    name: d.attr("name")?.to_string(),
                    parameter_type: d.attr("parameterType")?.to_string(),
                    value: d.attr("value")?.to_string(),
                })
            })
            .collect::<Result<_, XmlError>>()?,
        None => Vec::new(),
    };
    let road_network = top.require("RoadNetwork")?.require("LogicFile")?.attr("filepath")?.to_string();
    let entities = top.require("Entities")?.children("ScenarioObject").map(parse_entity).collect::<Result<_, _>>()?;
    let board = top.require("Storyboard")?;
    board.touch(&["StopTrigger"]);
    let init = match board.require("Init")?.child("Actions") {
        Some(actions) => actions.children("Private").map(parse_init).collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let (story_name, maneuver_groups) = match board.child("Story") {
        Some(story) => {
            let mut groups = Vec::new();
            for act in story.children("Act") {
                act.touch(&["StartTrigger"]);
                for g in act.children("ManeuverGroup") {
                    let actor = g.require("Actors")?.require("EntityRef")?.attr("entityRef")?.to_string();
                    let mut events = Vec::new();
                    for m in g.children("Maneuver") {
                        for e in m.children("Event") {
                            events.push(parse_event(e)?);
                        }
                    }
                    groups.push(ManeuverGroup { name: g.attr("name")?.to_string(), actor, events });
                }
            }
            (story.attr("name")?.to_string(), groups)
        }
        None => (String::new(), Vec::new()),
    };
    let document = OscDocument { header, parameters, road_network, entities, init, story_name, maneuver_groups };
    let mut diagnostics = Vec::new();
    tree.diagnostics(&mut diagnostics);
    Ok(OscParseResult { document, diagnostics })
}

fn mark_subtree(node: &Node) {
    node.used.set(true);
    node.children.iter().for_each(mark_subtree);
}
