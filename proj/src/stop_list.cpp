// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <string_view>

#include "groundseq/gateway.hpp"

namespace groundseq::gateway {

namespace {

// Abstract nouns with no stable visual extent.
constexpr std::array<std::string_view, 212> kAbstractNouns = {
    "ability",     "absence",     "abundance",   "acceptance",  "access",      "accuracy",
    "action",      "admiration",  "advantage",   "advice",      "affection",   "age",
    "agreement",   "ambition",    "anger",       "anticipation", "anxiety",    "appreciation",
    "approval",    "art",         "atmosphere",  "attention",   "attitude",    "awareness",
    "awe",         "balance",     "beauty",      "belief",      "bliss",       "boredom",
    "bravery",     "brilliance",  "calm",        "care",        "certainty",   "chance",
    "change",      "chaos",       "character",   "charity",     "childhood",   "clarity",
    "comfort",     "commitment",  "compassion",  "concept",     "confidence",  "confusion",
    "connection",  "consciousness", "contentment", "context",   "courage",     "creativity",
    "culture",     "curiosity",   "danger",      "death",       "decision",    "dedication",
    "delight",     "democracy",   "desire",      "despair",     "destiny",     "determination",
    "devotion",    "dignity",     "discipline",  "disgust",     "doubt",       "dream",
    "duty",        "education",   "ego",         "elegance",    "emotion",     "empathy",
    "energy",      "enthusiasm",  "envy",        "equality",    "eternity",    "ethics",
    "evil",        "excitement",  "existence",   "experience",  "faith",       "fame",
    "fantasy",     "fate",        "fear",        "feeling",     "fortune",     "freedom",
    "friendship",  "frustration", "fun",         "future",      "generosity",  "glory",
    "goodness",    "grace",       "gratitude",   "greed",       "grief",       "growth",
    "guilt",       "happiness",   "harmony",     "hate",        "hatred",      "health",
    "heritage",    "history",     "honesty",     "honor",       "hope",        "horror",
    "hospitality", "humility",    "humor",       "idea",        "identity",    "imagination",
    "importance",  "independence", "infinity",   "influence",   "information", "innocence",
    "insight",     "inspiration", "integrity",   "intelligence", "intention",  "interest",
    "intuition",   "joy",         "justice",     "kindness",    "knowledge",   "laughter",
    "leadership",  "liberty",     "life",        "loneliness",  "love",        "loyalty",
    "luck",        "luxury",      "memory",      "mercy",       "mind",        "misery",
    "moment",      "mood",        "motivation",  "mystery",     "nature",      "nostalgia",
    "opinion",     "opportunity", "pain",        "passion",     "patience",    "peace",
    "perception",  "perfection",  "personality", "philosophy",  "pleasure",    "poverty",
    "power",       "pride",       "progress",    "purpose",     "quality",     "reality",
    "reason",      "relaxation",  "relief",      "respect",     "romance",     "sadness",
    "safety",      "satisfaction", "serenity",   "silence",     "simplicity",  "skill",
    "solitude",    "sorrow",      "soul",        "spirit",      "strength",    "success",
    "surprise",    "sympathy",    "talent",      "tension",     "thought",     "time",
    "tranquility", "trust",       "truth",       "unity",       "vibe",        "wisdom",
    "wonder",      "youth",
};

}  // namespace

std::span<const std::string_view> default_abstract_nouns() { return kAbstractNouns; }

}  // namespace groundseq::gateway
