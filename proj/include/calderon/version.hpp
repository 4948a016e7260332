#pragma once

#define CALDERON_VERSION "0.1.0"
