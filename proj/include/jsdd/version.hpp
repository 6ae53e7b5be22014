#pragma once

#define JSDD_VERSION "0.1.0"
