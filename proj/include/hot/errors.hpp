#pragma once

#include <stdexcept>
#include <string>

namespace hot {

// Base class for every error the library raises on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define HOT_DEFINE_ERROR(Name)                                        \
    struct Name : Error {                                             \
        explicit Name(const std::string& msg) : Error(msg) {}         \
    }

// backend
HOT_DEFINE_ERROR(BackendUnavailable);
HOT_DEFINE_ERROR(ContextOverflow);
HOT_DEFINE_ERROR(MalformedResponse);
HOT_DEFINE_ERROR(UnknownToken);
HOT_DEFINE_ERROR(EnumerationTooLarge);

// prompts
HOT_DEFINE_ERROR(UnknownTemplate);
HOT_DEFINE_ERROR(UnknownItem);
HOT_DEFINE_ERROR(EmptyThoughts);
HOT_DEFINE_ERROR(EmptySummary);

// pipeline
HOT_DEFINE_ERROR(AllSamplesEmpty);
HOT_DEFINE_ERROR(SummaryParseFailure);
HOT_DEFINE_ERROR(EmptyResponse);

// metrics
HOT_DEFINE_ERROR(EmptyReference);

// corpus
HOT_DEFINE_ERROR(ParseError);
HOT_DEFINE_ERROR(DuplicateId);
HOT_DEFINE_ERROR(InsufficientTrainData);

// harness / cli
HOT_DEFINE_ERROR(CorpusError);
HOT_DEFINE_ERROR(AbortThreshold);
HOT_DEFINE_ERROR(UsageError);
HOT_DEFINE_ERROR(IoError);

#undef HOT_DEFINE_ERROR

}  // namespace hot
