#pragma once

// Default concept lexicons. data/lexicons/{work,home}.txt carry the same
// lists in the file format accepted by --work-lexicon / --home-lexicon.

#include <array>
#include <string_view>

namespace caltrend {

inline constexpr std::array<std::string_view, 270> kDefaultWorkKeywords = {
    "meeting", "meetings", "standup", "stand-up", "sync", "1:1", "one-on-one", "review", "reviews", "retro",
    "retrospective", "sprint", "planning", "roadmap", "kickoff", "kick-off", "demo", "presentation", "deck",
    "slides", "workshop", "training", "onboarding", "interview", "interviews", "hiring", "recruiting",
    "candidate", "offsite", "all-hands", "townhall", "board", "boardroom", "committee", "conference",
    "webinar", "seminar", "agenda", "minutes", "deadline", "deliverable", "deliverables", "milestone",
    "milestones", "project", "projects", "proposal", "report", "reports", "reporting", "quarterly", "q1",
    "q2", "q3", "q4", "okr", "okrs", "kpi", "kpis", "strategy", "strategic", "roadmapping", "brainstorm",
    "brainstorming", "alignment", "status", "update", "updates", "check-in", "checkin", "escalation",
    "office", "desk", "team", "teams", "department", "manager", "management", "director", "executive", "exec",
    "ceo", "cfo", "cto", "coo", "vp", "hr", "payroll", "staff", "staffing", "colleague", "colleagues",
    "coworker", "client", "clients", "customer", "customers", "vendor", "vendors", "partner", "partners",
    "partnership", "stakeholder", "stakeholders", "investor", "investors", "pitch", "negotiation", "contract",
    "contracts", "legal", "compliance", "audit", "audits", "policy", "procurement", "sales", "marketing",
    "campaign", "branding", "launch", "release", "rollout", "deployment", "deploy", "production", "prod",
    "staging", "outage", "incident", "postmortem", "oncall", "on-call", "engineering", "engineer",
    "engineers", "developer", "developers", "code", "coding", "debug", "debugging", "bug", "bugs", "bugfix",
    "feature", "features", "backlog", "ticket", "tickets", "jira", "qa", "testing", "test", "tests",
    "architecture", "design", "api", "backend", "frontend", "database", "server", "servers", "cloud", "aws",
    "infra", "infrastructure", "security", "devops", "analytics", "data", "dashboard", "metrics", "model",
    "prototype", "product", "products", "spec", "specs", "requirements", "documentation", "docs", "research",
    "analysis", "benchmark", "hackathon", "budget", "budgeting", "finance", "financial", "forecast",
    "forecasting", "revenue", "expenses", "expense", "invoice", "invoices", "invoicing", "billing",
    "accounting", "tax", "taxes", "earnings", "funding", "fundraising", "valuation", "equity", "portfolio",
    "trading", "stocks", "bank", "banking", "loan", "loans", "accounts", "payment", "payments", "pricing",
    "profit", "quarter", "fiscal", "operations", "ops", "logistics", "supply", "inventory", "shipment",
    "warehouse", "consulting", "consultant", "briefing", "debrief", "memo", "email", "emails", "call",
    "calls", "conf", "zoom", "teams-call", "webex", "hangout", "standups", "scrum", "kanban", "agile",
    "grooming", "refinement", "estimation", "performance", "appraisal", "promotion", "feedback", "mentoring",
    "mentorship", "coaching", "certification", "course", "lecture", "thesis", "paper", "papers", "submission",
    "grant", "lab", "office-hours", "shift", "overtime", "commute", "clinic-shift",
};

inline constexpr std::array<std::string_view, 163> kDefaultHomeKeywords = {
    "lunch", "dinner", "breakfast", "brunch", "coffee", "drinks", "party", "birthday", "anniversary",
    "wedding", "date", "date-night", "family", "mom", "dad", "mother", "father", "parents", "kids", "kid",
    "children", "son", "daughter", "baby", "grandma", "grandpa", "grandparents", "sister", "brother",
    "cousin", "aunt", "uncle", "wife", "husband", "partner-time", "boyfriend", "girlfriend", "friend",
    "friends", "friendsgiving", "bff", "hangout-friends", "bbq", "picnic", "potluck", "holiday", "holidays",
    "vacation", "trip", "travel", "flight", "hotel", "beach", "camping", "hiking", "hike", "gym", "workout",
    "yoga", "pilates", "run", "running", "jog", "swim", "swimming", "tennis", "golf", "soccer", "football",
    "basketball", "baseball", "cycling", "bike", "climbing", "ski", "skiing", "dentist", "doctor", "checkup",
    "appointment", "physio", "therapy", "therapist", "pharmacy", "vet", "haircut", "salon", "spa", "massage",
    "nails", "groceries", "grocery", "shopping", "laundry", "cleaning", "chores", "cooking", "bake", "baking",
    "garden", "gardening", "repair", "plumber", "movers", "moving", "rent", "mortgage", "church", "mass",
    "temple", "prayer", "bible", "worship", "school-pickup", "pickup", "dropoff", "daycare", "playdate",
    "recital", "practice", "soccer-practice", "piano", "guitar", "music", "concert", "movie", "movies",
    "cinema", "theater", "theatre", "show", "museum", "game", "games", "gaming", "netflix", "reading", "book",
    "bookclub", "book-club", "volunteer", "volunteering", "charity", "reunion", "graduation", "babysitter",
    "nanny", "pet", "dog", "walk", "nap", "sleep", "relax", "me-time", "hobby", "photography", "painting",
    "art", "christmas", "thanksgiving", "easter", "halloween", "newyear",
};

}  // namespace caltrend
